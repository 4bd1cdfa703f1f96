"""Channel-aware V2V collaborative perception with coverage-based judging.

Deterministic single-snapshot simulator: OFDM sub-channel capacity,
adaptive compression, collaborative-gain scoring of each CAV, a threshold
judger, and an analytic perception-quality proxy for comparing
cooperation policies.
"""

from .allocation import PolicyKind, TransmissionPlan, allocate_subchannels, build_transmission_plan
from .channel import ChannelParams, LinkState, channel_gain, compression_ratio, subchannel_capacity
from .estimators import CooperativePerception, CoverageScorer, FleetJudger
from .geometry import (
    CoverageScore,
    Disc,
    clipped_coverage_area,
    collaborative_score,
    lens_area,
    monte_carlo_region_area,
    score_profile,
)
from .judger import JudgerDecision, JudgerPolicy, filter_fleet, judge, normalize_scores
from .pipeline import (
    InfeasibleQuery,
    MinBandwidthQuery,
    SweepSpec,
    compare_policies,
    min_required_bandwidth,
    run_pipeline,
    sweep,
)
from .proxy import ProxyParams, net_gain, proxy_ap, reconstruction_quality, staleness_quality
from .scenario import (
    ScenarioConfig,
    ScenarioError,
    SimulationReport,
    Vehicle,
    dump_scenario,
    load_scenario,
    load_suite,
    suite_names,
    write_report,
)

__version__ = "0.1.0"
