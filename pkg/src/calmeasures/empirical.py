"""Empirical data model shared by every calibration measure.

Everything downstream works on finitely supported joints over
(prediction, label) pairs.  Measures that genuinely depend on the feature
space (the distance-to-calibration oracles) consume a ``FiniteInstance``,
which carries point masses and conditional label means per feature point.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

MASS_TOL = 1e-12
# Inputs whose total mass drifts by less than this are silently renormalized.
MASS_DRIFT_LIMIT = 1e-9


@dataclass(frozen=True)
class EmpiricalJoint:
    """Finitely supported distribution over (prediction, label) pairs.

    Atoms are kept in canonical form: sorted by (v, y), exact-equal (v, y)
    merged, masses normalized to sum to 1.  Values differing in the last
    float bit are deliberately NOT merged; measures must tolerate
    near-duplicate prediction values.
    """

    atoms: tuple[tuple[float, int, float], ...]

    @staticmethod
    def make(atoms: Iterable[tuple[float, int, float]]) -> "EmpiricalJoint":
        merged: dict[tuple[float, int], float] = {}
        for v, y, m in atoms:
            v = float(v)
            y = int(y)
            m = float(m)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"prediction {v} outside [0, 1]")
            if y not in (0, 1):
                raise ValueError(f"label {y} not in {{0, 1}}")
            if m < 0.0:
                raise ValueError(f"negative mass {m}")
            if m > 0.0:
                merged[(v, y)] = merged.get((v, y), 0.0) + m
        if not merged:
            raise ValueError("empty joint: no atoms with positive mass")
        total = sum(merged.values())
        canon = tuple(
            (v, y, m / total) for (v, y), m in sorted(merged.items())
        )
        return EmpiricalJoint(canon)

    @property
    def total_mass(self) -> float:
        return sum(m for _, _, m in self.atoms)

    def distinct_values(self) -> list[float]:
        seen: dict[float, None] = {}
        for v, _, _ in self.atoms:
            seen.setdefault(v)
        return sorted(seen)

    def level_sets(self) -> dict[float, tuple[float, float]]:
        """Per distinct prediction v: (mass of the level set, mean label)."""
        mass: dict[float, float] = {}
        ymass: dict[float, float] = {}
        for v, y, m in self.atoms:
            mass[v] = mass.get(v, 0.0) + m
            ymass[v] = ymass.get(v, 0.0) + m * y
        return {v: (mass[v], ymass[v] / mass[v]) for v in mass}


@dataclass(frozen=True)
class RecalibrationMap:
    """Conditional label mean per distinct prediction value of a joint."""

    entries: tuple[tuple[float, float], ...]

    def __call__(self, v: float) -> float:
        for u, phat in self.entries:
            if u == v:
                return phat
        raise KeyError(f"prediction value {v} not in recalibration domain")

    def as_dict(self) -> dict[float, float]:
        return dict(self.entries)


@dataclass(frozen=True)
class FiniteInstance:
    """Finite feature space with point masses, predictions and conditional
    label means.  Exists only for measures that depend on the feature space;
    everything else consumes the projection to an EmpiricalJoint.
    """

    points: tuple[tuple[str, float, float, float], ...]

    @staticmethod
    def make(
        points: Iterable[tuple[str, float, float, float]]
    ) -> "FiniteInstance":
        rows = []
        for pid, mass, pred, cond_mean in points:
            mass = float(mass)
            pred = float(pred)
            cond_mean = float(cond_mean)
            if mass < 0.0:
                raise ValueError(f"negative mass at point {pid!r}")
            if not 0.0 <= pred <= 1.0:
                raise ValueError(f"pred {pred} outside [0, 1] at {pid!r}")
            if not 0.0 <= cond_mean <= 1.0:
                raise ValueError(
                    f"cond_mean {cond_mean} outside [0, 1] at {pid!r}"
                )
            if mass > 0.0:
                rows.append((str(pid), mass, pred, cond_mean))
        if not rows:
            raise ValueError("empty instance: no points with positive mass")
        total = sum(m for _, m, _, _ in rows)
        return FiniteInstance(
            tuple((pid, m / total, p, c) for pid, m, p, c in rows)
        )

    def perturb_preds(self, deltas: Sequence[float]) -> "FiniteInstance":
        """New instance with each pred shifted by deltas[i], clipped to [0,1]."""
        if len(deltas) != len(self.points):
            raise ValueError("one delta per point required")
        return FiniteInstance.make(
            (pid, m, min(1.0, max(0.0, p + d)), c)
            for (pid, m, p, c), d in zip(self.points, deltas)
        )


def from_samples(
    pairs: Sequence[tuple[float, int]],
    weights: Sequence[float] | None = None,
) -> EmpiricalJoint:
    """Build a canonical joint from (prediction, label) samples.

    Unweighted input gets uniform mass 1/n; weights are normalized by their
    sum, so they are scale invariant.
    """
    if not pairs:
        raise ValueError("empty input")
    if weights is None:
        weights = [1.0] * len(pairs)
    if len(weights) != len(pairs):
        raise ValueError("weights length must match pairs length")
    for w in weights:
        if w < 0.0:
            raise ValueError(f"negative weight {w}")
    if sum(weights) <= 0.0:
        raise ValueError("weights sum to zero")
    return EmpiricalJoint.make(
        (v, y, w) for (v, y), w in zip(pairs, weights)
    )


def recalibrate(joint: EmpiricalJoint) -> RecalibrationMap:
    """Map each distinct prediction value v to E[y | v] under the joint."""
    levels = joint.level_sets()
    return RecalibrationMap(
        tuple((v, levels[v][1]) for v in sorted(levels))
    )


def recalibrated_joint(joint: EmpiricalJoint) -> EmpiricalJoint:
    """Replace each atom's prediction by its recalibrated value and re-merge."""
    phat = recalibrate(joint).as_dict()
    return EmpiricalJoint.make(
        (phat[v], y, m) for v, y, m in joint.atoms
    )


def project(instance: FiniteInstance) -> EmpiricalJoint:
    """Project a finite instance to its (prediction, label) joint.

    Each point's mass splits cond_mean : (1 - cond_mean) between labels 1
    and 0 at its predicted value.
    """
    atoms = []
    for _, mass, pred, cond_mean in instance.points:
        atoms.append((pred, 1, mass * cond_mean))
        atoms.append((pred, 0, mass * (1.0 - cond_mean)))
    return EmpiricalJoint.make(atoms)


# ---------------------------------------------------------------------------
# ingestion / emission


def read_csv(path: str | Path) -> EmpiricalJoint:
    """Columns prediction,label[,weight]; header required."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "prediction" not in reader.fieldnames:
            raise ValueError(f"{path}: missing header with 'prediction' column")
        pairs: list[tuple[float, int]] = []
        weights: list[float] = []
        weighted = "weight" in reader.fieldnames
        for row in reader:
            pairs.append((float(row["prediction"]), int(row["label"])))
            if weighted:
                weights.append(float(row["weight"]))
    return from_samples(pairs, weights if weighted else None)


def read_jsonl(path: str | Path) -> EmpiricalJoint:
    """One object {"p": float, "y": 0|1, "w": float?} per line."""
    pairs: list[tuple[float, int]] = []
    weights: list[float] = []
    any_weight = False
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            pairs.append((float(obj["p"]), int(obj["y"])))
            if "w" in obj:
                any_weight = True
                weights.append(float(obj["w"]))
            else:
                weights.append(1.0)
    if not pairs:
        raise ValueError(f"{path}: no records")
    return from_samples(pairs, weights if any_weight else None)


def read_instance_json(path: str | Path) -> FiniteInstance:
    """Array of {"id": str, "mass": float, "pred": float, "cond_mean": float}."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of points")
    return FiniteInstance.make(
        (obj["id"], obj["mass"], obj["pred"], obj["cond_mean"]) for obj in data
    )


def write_instance_json(instance: FiniteInstance, path: str | Path) -> None:
    data = [
        {"id": pid, "mass": m, "pred": p, "cond_mean": c}
        for pid, m, p, c in instance.points
    ]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
