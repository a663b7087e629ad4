"""Coefficient tuning: a tabular agent walks the integer lattice of ranking
coefficients, one step per measurement interval (MIN), rewarded by the change
in the scalar objective between consecutive intervals.

The disk persists across intervals; the workload stream continues from the
same generator. A hill-climb mode reuses the identical machinery with
learning rate 1 and discount 0, which makes the table hold the latest
observed objective delta per (state, action).
"""

import hashlib
import json
import math
import random
from dataclasses import dataclass

from .disk import new_disk
from .model import DiskGeometry, Hyperparams
from .policies import FIRST_FIT, ApexPolicy, make_policy
from .recovery import PerfWeights, performance
from .vfs import FileSystem
from .workload import WorkloadConfig, WorkloadRunner

Q_LEARNING = "q-learning"
HILL_CLIMB = "hill-climb"

# Eight actions: bump one of the four coefficients up or down by one.
# Index order is fixed; ties in greedy selection go to the lowest index.
ACTIONS = tuple((coef, delta) for coef in range(4) for delta in (1, -1))

_AGENT_SEED_OFFSET = 7919  # keeps the agent stream off the workload stream


@dataclass(frozen=True)
class TrainSchedule:
    """Exploration schedule: epsilon decays exponentially per interval and
    reaches the floor exactly when the interval budget runs out."""

    min_budget: int
    oin_per_min: int = 1000
    epsilon_floor: float = 3e-5
    tau: float | None = None

    def __post_init__(self):
        if self.min_budget < 0:
            raise ValueError("min_budget must be >= 0")
        if self.oin_per_min < 1:
            raise ValueError("oin_per_min must be >= 1")
        if not 0.0 < self.epsilon_floor < 1.0:
            raise ValueError("epsilon_floor must lie in (0, 1)")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")

    @property
    def effective_tau(self) -> float:
        if self.tau is not None:
            return self.tau
        if self.min_budget == 0:
            return 1.0
        return self.min_budget / math.log(1.0 / self.epsilon_floor)

    def epsilon(self, min_count: int) -> float:
        return math.exp(-min_count / self.effective_tau)


class QTable:
    """State -> eight action values, lazily zero-initialized. Only visited
    states ever materialize."""

    def __init__(self):
        self._table: dict[tuple, list[float]] = {}

    def values(self, state: tuple) -> list[float]:
        row = self._table.get(state)
        if row is None:
            row = [0.0] * len(ACTIONS)
            self._table[state] = row
        return row

    def best_action(self, state: tuple) -> int:
        row = self._table.get(state)
        if row is None:
            return 0
        best = 0
        for i in range(1, len(row)):
            if row[i] > row[best]:
                best = i
        return best

    def max_q(self, state: tuple) -> float:
        row = self._table.get(state)
        return max(row) if row else 0.0

    def items(self):
        return self._table.items()

    def __len__(self):
        return len(self._table)


def apply_action(state: tuple, action: int) -> tuple:
    """Next lattice point; stepping outside the range is a self-loop."""
    coef, delta = ACTIONS[action]
    value = state[coef] + delta
    if not Hyperparams.LATTICE_MIN <= value <= Hyperparams.LATTICE_MAX:
        return state
    out = list(state)
    out[coef] = value
    return tuple(out)


def select_action(qtable: QTable, state: tuple, eps: float, rng: random.Random) -> int:
    """Epsilon-greedy over the eight actions."""
    if rng.random() < eps:
        return rng.randrange(len(ACTIONS))
    return qtable.best_action(state)


def q_update(qtable, state, action, reward, next_state, learning_rate, discount) -> float:
    """One tabular update; returns the new value. Non-finite rewards are a
    caller bug and get rejected loudly."""
    if not math.isfinite(reward):
        raise ValueError(f"non-finite reward {reward!r}")
    row = qtable.values(state)
    target = reward + discount * qtable.max_q(next_state)
    row[action] += learning_rate * (target - row[action])
    return row[action]


@dataclass(frozen=True)
class TrainConfig:
    geometry: DiskGeometry
    schedule: TrainSchedule
    workload: WorkloadConfig
    weights: PerfWeights = PerfWeights(1.0, 0.0)
    initial: Hyperparams = Hyperparams(1, 1, 1, 1)
    learning_rate: float = 0.1
    discount: float = 0.9
    mode: str = Q_LEARNING
    invert_link_rule: bool = False

    def __post_init__(self):
        if not self.initial.in_lattice():
            raise ValueError(
                f"initial coefficients {self.initial.as_tuple()} outside "
                f"[{Hyperparams.LATTICE_MIN}, {Hyperparams.LATTICE_MAX}]"
            )
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError("discount must lie in [0, 1)")
        if self.mode not in (Q_LEARNING, HILL_CLIMB):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "schedule": {
                "min_budget": self.schedule.min_budget,
                "oin_per_min": self.schedule.oin_per_min,
                "epsilon_floor": self.schedule.epsilon_floor,
                "tau": self.schedule.effective_tau,
            },
            "workload": self.workload.to_dict(),
            "weights": {
                "alpha": self.weights.alpha,
                "beta": self.weights.beta,
                "aat_mode": self.weights.aat_mode,
            },
            "initial": list(self.initial.as_tuple()),
            "learning_rate": self.learning_rate,
            "discount": self.discount,
            "mode": self.mode,
            "invert_link_rule": self.invert_link_rule,
        }


@dataclass(frozen=True)
class MinRecord:
    min_index: int
    p: float
    epsilon: float
    state: tuple
    action: int
    reward: float

    def to_dict(self) -> dict:
        return {
            "min": self.min_index,
            "p": self.p,
            "epsilon": self.epsilon,
            "state": list(self.state),
            "action": self.action,
            "reward": self.reward,
        }


@dataclass
class TrainReport:
    config: dict
    config_sha256: str
    seed: int
    p_initial: float
    trajectory: list[MinRecord]
    final_epsilon: float
    visited: dict
    best_state: tuple
    final_state: tuple
    final_greedy_p: float
    first_fit_p: float
    states_seen: int = 0

    @property
    def first_min_p(self) -> float:
        return self.trajectory[0].p if self.trajectory else self.p_initial

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "config_sha256": self.config_sha256,
            "seed": self.seed,
            "p_initial": self.p_initial,
            "trajectory": [r.to_dict() for r in self.trajectory],
            "final_epsilon": self.final_epsilon,
            "visited": {",".join(map(str, k)): v for k, v in self.visited.items()},
            "best_state": list(self.best_state),
            "final_state": list(self.final_state),
            "first_min_p": self.first_min_p,
            "final_greedy_p": self.final_greedy_p,
            "first_fit_p": self.first_fit_p,
            "states_seen": self.states_seen,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def csv_rows(self):
        """Trajectory as (MIN, P, epsilon, hist, usage, spatial, link) rows."""
        yield ("min", "p", "epsilon", "hist", "usage", "spatial", "link")
        for r in self.trajectory:
            yield (r.min_index, r.p, r.epsilon, *r.state)


def _measure(fs, weights) -> float:
    fs.mark_obsolete_sweep()
    return performance(fs.disk, fs, weights)


def evaluate_policy(config: TrainConfig, hp: Hyperparams, policy_kind: str) -> float:
    """Objective after one interval's worth of ops on a fresh disk under the
    given coefficients and allocation policy, same workload seed."""
    disk = new_disk(config.geometry, hp)
    policy = make_policy(policy_kind, seed=config.workload.rng_seed)
    fs = FileSystem(disk, policy=policy, invert_link_rule=config.invert_link_rule)
    runner = WorkloadRunner(config.workload, fs)
    runner.run(config.schedule.oin_per_min)
    return _measure(fs, config.weights)


def train(config: TrainConfig) -> TrainReport:
    """Full tuning loop. Deterministic for a fixed config."""
    schedule = config.schedule
    disk = new_disk(config.geometry, config.initial)
    fs = FileSystem(disk, policy=ApexPolicy(), invert_link_rule=config.invert_link_rule)
    runner = WorkloadRunner(config.workload, fs)
    agent_rng = random.Random(config.workload.rng_seed + _AGENT_SEED_OFFSET)

    lr, gamma = config.learning_rate, config.discount
    if config.mode == HILL_CLIMB:
        lr, gamma = 1.0, 0.0

    qtable = QTable()
    state = config.initial.as_tuple()
    visited: dict[tuple, int] = {}
    trajectory: list[MinRecord] = []
    p_prev = _measure(fs, config.weights)
    p_initial = p_prev

    m = 0
    while m < schedule.min_budget:
        eps = schedule.epsilon(m)
        if eps <= schedule.epsilon_floor:
            break
        visited[state] = visited.get(state, 0) + 1
        runner.run(schedule.oin_per_min)
        p = _measure(fs, config.weights)
        # The first interval has no predecessor to difference against, so it
        # carries no reward and leaves the table untouched.
        reward = p - p_prev if m > 0 else 0.0
        p_prev = p
        action = select_action(qtable, state, eps, agent_rng)
        next_state = apply_action(state, action)
        if m > 0:
            q_update(qtable, state, action, reward, next_state, lr, gamma)
        trajectory.append(MinRecord(m, p, eps, state, action, reward))
        state = next_state
        disk.set_hyperparams(Hyperparams.from_tuple(state))
        m += 1

    if len(qtable):
        best_state = None
        best_q = -math.inf
        for s, row in sorted(qtable.items()):
            top = max(row)
            if top > best_q:
                best_q = top
                best_state = s
    else:
        best_state = state

    cfg_dict = config.to_dict()
    cfg_json = json.dumps(cfg_dict, sort_keys=True, separators=(",", ":"))
    return TrainReport(
        config=cfg_dict,
        config_sha256=hashlib.sha256(cfg_json.encode()).hexdigest(),
        seed=config.workload.rng_seed,
        p_initial=p_initial,
        trajectory=trajectory,
        final_epsilon=schedule.epsilon(m),
        visited=visited,
        best_state=best_state,
        final_state=state,
        final_greedy_p=evaluate_policy(config, Hyperparams.from_tuple(best_state), "apex"),
        first_fit_p=evaluate_policy(config, Hyperparams.from_tuple(best_state), FIRST_FIT),
        states_seen=len(qtable),
    )
