"""scikit-learn style front end.

A scene is an array ``X`` of shape ``(n_vehicles, 3)`` or
``(n_vehicles, 4)`` with columns ``x_m, y_m, sensing_radius_m`` and
optionally ``data_volume_bits``. Row ``ego_index`` is the ego vehicle.
Hyper-parameters are flat constructor arguments, so ``get_params`` /
``set_params`` / ``clone`` and parameter grids work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .allocation import PolicyKind
from .channel import THERMAL_NOISE_W_PER_HZ, ChannelParams
from .geometry import Disc, collaborative_score
from .judger import JudgerPolicy, filter_fleet, judge
from .pipeline import run_pipeline
from .proxy import ProxyParams
from .scenario import DEFAULT_D_MAX_M, DEFAULT_DATA_VOLUME_BITS, ScenarioConfig, Vehicle

__all__ = ["check_fleet", "fleet_to_vehicles", "CoverageScorer", "FleetJudger", "CooperativePerception"]


def check_fleet(X, ego_index: int = 0, d_max: float | None = None) -> np.ndarray:
    """Validate a scene array and return it as float64 with 4 columns."""
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if X.shape[1] not in (3, 4):
        raise ValueError(f"expected 3 or 4 columns (x, y, radius[, volume]), got {X.shape[1]}")
    if X.shape[1] == 3:
        X = np.column_stack([X, np.full(len(X), DEFAULT_DATA_VOLUME_BITS)])
    if not -len(X) <= ego_index < len(X):
        raise ValueError(f"ego_index {ego_index} out of range for {len(X)} vehicles")
    if np.any(X[:, 2] <= 0):
        raise ValueError("sensing radii must be positive")
    if np.any(X[:, 3] <= 0):
        raise ValueError("data volumes must be positive")
    if d_max is not None and np.any(X[:, 2] >= d_max):
        raise ValueError("sensing radius exceeds MCSC")
    return X


def fleet_to_vehicles(X: np.ndarray, ego_index: int = 0):
    """Turn a validated scene array into ``(vehicles, ego_id)``.

    Ids are zero-padded row numbers so that id order equals row order.
    """
    width = len(str(len(X) - 1))
    vehicles = tuple(Vehicle(f"v{i:0{width}d}", *map(float, row)) for i, row in enumerate(X))
    return vehicles, vehicles[ego_index].id


class CoverageScorer(TransformerMixin, BaseEstimator):
    """Collaborative-gain area of each vehicle with respect to a fitted ego.

    ``fit`` records the ego disc and the scene's largest gain;
    ``transform`` returns ``[raw_m2, normalized]`` per row.
    """

    def __init__(self, d_max=DEFAULT_D_MAX_M, ego_index=0):
        self.d_max = d_max
        self.ego_index = ego_index

    def _raw(self, X):
        return np.array([collaborative_score(Disc((x, y), r), self.ego_disc_, self.d_max)
                         for x, y, r, _ in X])

    def fit(self, X, y=None):
        X = check_fleet(X, self.ego_index, self.d_max)
        x, y_, r, _ = X[self.ego_index]
        self.ego_disc_ = Disc((x, y_), r)
        self.n_features_in_ = X.shape[1]
        raw = np.delete(self._raw(X), self.ego_index % len(X))
        self.scale_ = float(raw.max()) if raw.size else 0.0
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        X = check_fleet(X, 0, self.d_max)
        raw = self._raw(X)
        norm = np.clip(raw / self.scale_, 0.0, 1.0) if self.scale_ > 0 else np.zeros_like(raw)
        return np.column_stack([raw, norm])


class FleetJudger(BaseEstimator):
    """Keep/drop decision for every vehicle of a scene.

    After ``fit``: ``decisions_`` (ego first), ``raw_scores_``,
    ``normalized_scores_`` and ``kept_mask_`` in row order, plus
    ``score_evaluations_`` (always ``n_vehicles - 1``).
    """

    def __init__(self, d_max=DEFAULT_D_MAX_M, ego_index=0, score_threshold_3cav=0.4,
                 score_threshold_4cav=0.3, distance_fraction=0.5):
        self.d_max = d_max
        self.ego_index = ego_index
        self.score_threshold_3cav = score_threshold_3cav
        self.score_threshold_4cav = score_threshold_4cav
        self.distance_fraction = distance_fraction

    def _policy(self):
        return JudgerPolicy(self.score_threshold_3cav, self.score_threshold_4cav, self.distance_fraction)

    def fit(self, X, y=None):
        X = check_fleet(X, self.ego_index, self.d_max)
        vehicles, ego_id = fleet_to_vehicles(X, self.ego_index)
        result = filter_fleet(vehicles, ego_id, self.d_max, self._policy())
        by_id = {d.cav_id: d for d in result.decisions}
        self.decisions_ = result.decisions
        self.score_evaluations_ = result.score_evaluations
        self.raw_scores_ = np.array([result.raw_scores.get(v.id, 0.0) for v in vehicles])
        self.normalized_scores_ = np.array([by_id[v.id].normalized_score for v in vehicles])
        self.kept_mask_ = np.array([by_id[v.id].kept for v in vehicles])
        self.ego_disc_ = Disc(vehicles[self.ego_index].position, vehicles[self.ego_index].sensing_radius_m)
        self.scale_ = float(self.raw_scores_.max()) if len(X) > 1 else 0.0
        self.n_vehicles_ = len(X)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        """Judge the rows of ``X`` against the fitted ego and score scale."""
        check_is_fitted(self, "kept_mask_")
        X = check_fleet(X, 0, self.d_max)
        policy = self._policy()
        kept = []
        for x, y, r, _ in X:
            disc = Disc((x, y), r)
            raw = collaborative_score(disc, self.ego_disc_, self.d_max)
            norm = min(1.0, raw / self.scale_) if self.scale_ > 0 else 0.0
            distance = float(np.hypot(x - self.ego_disc_.center[0], y - self.ego_disc_.center[1]))
            kept.append(distance == 0 or judge(norm, distance, self.n_vehicles_, self.d_max, policy).kept)
        return np.array(kept)

    def fit_predict(self, X, y=None):
        return self.fit(X).kept_mask_


class CooperativePerception(BaseEstimator):
    """Full cooperation pipeline for one policy.

    ``fit(X)`` runs the scene and stores ``report_`` and ``config_``;
    ``predict(X)`` returns which vehicles transmit (the ego counts as
    kept); ``score(X)`` returns the proxy AP.
    """

    def __init__(self, policy="SmartCooper", d_max=DEFAULT_D_MAX_M, ego_index=0,
                 total_bandwidth_hz=200e6, num_subchannels=3, transmit_power_w=8e-3,
                 noise_density_w_per_hz=THERMAL_NOISE_W_PER_HZ, pathloss_exponent=2.5,
                 reference_distance_m=1.0, fading_enabled=False, frame_window_s=0.1,
                 score_threshold_3cav=0.4, score_threshold_4cav=0.3, distance_fraction=0.5,
                 gamma=0.5, lambda_penalty=0.25, tau_max_s=0.1, ap_single=0.409, ap_max=0.70,
                 seed=0):
        self.policy = policy
        self.d_max = d_max
        self.ego_index = ego_index
        self.total_bandwidth_hz = total_bandwidth_hz
        self.num_subchannels = num_subchannels
        self.transmit_power_w = transmit_power_w
        self.noise_density_w_per_hz = noise_density_w_per_hz
        self.pathloss_exponent = pathloss_exponent
        self.reference_distance_m = reference_distance_m
        self.fading_enabled = fading_enabled
        self.frame_window_s = frame_window_s
        self.score_threshold_3cav = score_threshold_3cav
        self.score_threshold_4cav = score_threshold_4cav
        self.distance_fraction = distance_fraction
        self.gamma = gamma
        self.lambda_penalty = lambda_penalty
        self.tau_max_s = tau_max_s
        self.ap_single = ap_single
        self.ap_max = ap_max
        self.seed = seed

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "CooperativePerception":
        """Estimator carrying a scenario's hyper-parameters (not its vehicles)."""
        ego_index = [v.id for v in config.vehicles].index(config.ego_id)
        params = {}
        for section in (config.channel, config.judger, config.proxy):
            params.update(vars(section))
        return cls(policy=config.policy.value, d_max=config.d_max_m, ego_index=ego_index,
                   seed=config.seed, **params)

    def to_config(self, X) -> ScenarioConfig:
        X = check_fleet(X, self.ego_index, self.d_max)
        vehicles, ego_id = fleet_to_vehicles(X, self.ego_index)
        p = self.get_params()
        pick = lambda cls: cls(**{k: p[k] for k in cls.__dataclass_fields__})  # noqa: E731
        return ScenarioConfig(
            ego_id=ego_id, vehicles=vehicles, d_max_m=float(self.d_max),
            channel=pick(ChannelParams), judger=pick(JudgerPolicy), proxy=pick(ProxyParams),
            policy=PolicyKind.parse(self.policy), seed=int(self.seed),
        )

    def fit(self, X, y=None):
        self.config_ = self.to_config(X)
        self.report_ = run_pipeline(self.config_)
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def _kept(self, config, report):
        kept = set(report.kept_ids) | {config.ego_id}
        return np.array([v.id in kept for v in config.vehicles])

    def predict(self, X):
        check_is_fitted(self, "report_")
        config = self.to_config(X)
        return self._kept(config, run_pipeline(config))

    def score(self, X, y=None):
        config = self.to_config(X)
        return run_pipeline(config).proxy_ap
