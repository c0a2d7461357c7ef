"""
Arc-Length Continuation

Crisfield's method with the constraint |du|^2 + psi^2 dlam^2 = dL^2.
Each step is predicted along the tangent K^-1 F_ref and corrected with full
Newton iterations, picking the constraint root with the largest cosine
against the current increment. Rejected steps halve dL down to a floor.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import structlog

from errors import ArcLengthError, ParameterError, SolverError
from .linear import factorize
from .models import ArcLengthSettings, ContinuationPath, EquilibriumProblem, PathPoint
from .newton import residual_scale

log = structlog.get_logger(__name__)

CONSTRAINT_TOL = 1e-8

Monitor = Callable[[np.ndarray], np.ndarray]


class _StepRejected(Exception):
    """A step failed and should be retried with a smaller increment."""


@dataclass
class _Increment:
    u: np.ndarray
    lam: float
    du: np.ndarray
    dlam: float
    iterations: int
    residual: float
    compliance: float     # F_ref . K^-1 F_ref at the start of the step
    arc_length: float


def _no_monitor(u: np.ndarray) -> np.ndarray:
    return np.zeros(0)


class ArcLengthSolver:
    """
    Continuation of R(u, lambda) = 0 past limit points.

    Args:
        problem: Equilibrium problem
        settings: Continuation controls
        monitor: Maps u to the recorded displacement components
    """

    def __init__(self, problem: EquilibriumProblem, settings: Optional[ArcLengthSettings] = None, monitor: Optional[Monitor] = None):
        self.problem = problem
        self.settings = settings or ArcLengthSettings()
        self.monitor = monitor or _no_monitor
        self.reference = np.asarray(problem.reference_load, dtype=float)
        if not np.any(self.reference):
            raise ParameterError("arc-length continuation needs a non-zero reference load")
        self._first_compliance: Optional[float] = None

    # ------------------------------------------------------------------

    def initial_arc_length(self, u0: np.ndarray) -> float:
        """Given increment, or the length of the first linear load step."""
        settings = self.settings
        if settings.arc_length is not None:
            return settings.arc_length
        du = factorize(self.problem.tangent(u0)).solve(self.reference) * settings.initial_load_increment
        return float(np.sqrt(du @ du + (settings.psi * settings.initial_load_increment) ** 2))

    def _constraint(self, du: np.ndarray, dlam: float) -> float:
        return float(du @ du + self.settings.psi ** 2 * dlam ** 2)

    def step(self, u_n: np.ndarray, lam_n: float, arc_length: float, previous: Optional[Tuple[np.ndarray, float]]) -> _Increment:
        """
        One predictor-corrector step from a converged point.

        Raises:
            _StepRejected: complex constraint roots, non-finite residual or no convergence
        """
        psi2 = self.settings.psi ** 2
        newton = self.settings.newton
        F = self.reference
        try:
            lu = factorize(self.problem.tangent(u_n))
        except SolverError as e:
            raise _StepRejected(str(e)) from e
        du_F = lu.solve(F)
        compliance = float(F @ du_F)

        sign = 1.0
        if previous is not None:
            du_prev, dlam_prev = previous
            sign = 1.0 if du_F @ du_prev + psi2 * dlam_prev >= 0.0 else -1.0
        dlam = sign * arc_length / np.sqrt(du_F @ du_F + psi2)
        du = dlam * du_F

        for iteration in range(newton.max_iterations + 1):
            u = u_n + du
            lam = lam_n + dlam
            residual = self.problem.residual(u, lam)
            norm = float(np.linalg.norm(residual))
            if not np.isfinite(norm):
                raise _StepRejected("non-finite residual")
            scale = residual_scale(self.problem, lam, newton)
            if norm <= newton.tolerance * scale or norm <= newton.absolute_tolerance:
                return _Increment(u, lam, du, dlam, iteration, norm, compliance, arc_length)
            if iteration == newton.max_iterations:
                break

            try:
                lu = factorize(self.problem.tangent(u))
            except SolverError as e:
                raise _StepRejected(str(e)) from e
            du_R = lu.solve(-residual)
            du_F = lu.solve(F)

            w = du + du_R
            a1 = du_F @ du_F + psi2
            a2 = 2.0 * (du_F @ w + psi2 * dlam)
            a3 = w @ w + psi2 * dlam ** 2 - arc_length ** 2
            disc = a2 * a2 - 4.0 * a1 * a3
            if disc < 0.0:
                raise _StepRejected(f"complex constraint roots (discriminant {disc:.3e})")
            root = np.sqrt(disc)
            best = None
            for delta in ((-a2 + root) / (2.0 * a1), (-a2 - root) / (2.0 * a1)):
                candidate = w + delta * du_F
                cosine = (candidate @ du + psi2 * (dlam + delta) * dlam) / arc_length ** 2
                if best is None or cosine > best[0]:
                    best = (cosine, candidate, dlam + delta)
            _, du, dlam = best
            log.debug("arc_length_iteration", iteration=iteration + 1, lam=lam_n + dlam, residual=norm, cosine=best[0])

        raise _StepRejected(f"corrector did not converge in {newton.max_iterations} iterations")

    def _point(self, index: int, increment: _Increment) -> PathPoint:
        if self._first_compliance is None:
            self._first_compliance = increment.compliance
        stiffness = self._first_compliance / increment.compliance if increment.compliance != 0.0 else 0.0
        return PathPoint(
            step=index,
            lam=increment.lam,
            u=increment.u,
            monitors=np.asarray(self.monitor(increment.u), dtype=float),
            stiffness=float(stiffness),
            iterations=increment.iterations,
            residual=increment.residual,
            arc_length=increment.arc_length,
        )

    def _refine_limit(self, base: PathPoint, base_increment: Tuple[np.ndarray, float], arc_length: float) -> Optional[PathPoint]:
        """Bisect the increment from the last ascending point toward the load maximum."""
        best: Optional[PathPoint] = None
        previous = base_increment
        u, lam = base.u, base.lam
        for _ in range(self.settings.limit_refinements):
            arc_length *= 0.5
            try:
                increment = self.step(u, lam, arc_length, previous)
            except _StepRejected:
                continue
            if increment.dlam > 0.0:
                point = self._point(base.step, increment)
                best = point
                u, lam, previous = increment.u, increment.lam, (increment.du, increment.dlam)
        return best

    def run(self, u0: Optional[np.ndarray] = None, lam0: float = 0.0) -> ContinuationPath:
        """
        Trace the equilibrium path.

        Returns:
            ContinuationPath: starting point plus every accepted step

        Raises:
            ArcLengthError: increment fell below its floor or a converged step
                violates the constraint (carries the partial path)
        """
        settings = self.settings
        u = np.zeros(self.problem.n_dofs) if u0 is None else np.array(u0, dtype=float)
        lam = float(lam0)
        arc_length = self.initial_arc_length(u)
        floor, ceiling = arc_length * settings.min_ratio, arc_length * settings.max_ratio

        path = ContinuationPath()
        path.append(PathPoint(
            step=0, lam=lam, u=u, monitors=np.asarray(self.monitor(u), dtype=float), stiffness=1.0,
            iterations=0, residual=float(np.linalg.norm(self.problem.residual(u, lam))), arc_length=0.0,
        ))
        previous: Optional[Tuple[np.ndarray, float]] = None
        log.info("arc_length_start", arc_length=arc_length, psi=settings.psi, max_steps=settings.max_steps)

        step = 0
        while step < settings.max_steps:
            try:
                increment = self.step(u, lam, arc_length, previous)
            except _StepRejected as e:
                arc_length *= 0.5
                log.warning("arc_length_rejected", step=step + 1, reason=str(e), arc_length=arc_length)
                if arc_length < floor:
                    raise ArcLengthError(
                        f"arc-length increment fell below {floor:.3e} at lambda = {lam:.6g}", path
                    ) from e
                continue

            step += 1
            constraint = self._constraint(increment.du, increment.dlam)
            error = abs(constraint - arc_length ** 2) / arc_length ** 2
            if error > CONSTRAINT_TOL:
                log.error("arc_length_constraint", step=step, error=error)
                raise ArcLengthError(
                    f"step {step} violates the arc-length constraint by {error:.3e} at lambda = {increment.lam:.6g}", path
                )

            if settings.detect_limit_points and previous is not None and previous[1] > 0.0 > increment.dlam:
                refined = self._refine_limit(path.points[-1], previous, arc_length) if settings.limit_refinements else None
                limit = refined or path.points[-1]
                limit.limit = True
                if refined is not None:
                    path.append(refined)
                log.info("limit_point", step=step, lam=limit.lam)

            point = self._point(step, increment)
            path.append(point)
            log.info(
                "arc_length_step",
                step=step,
                lam=point.lam,
                residual=point.residual,
                arc_length=arc_length,
                iterations=point.iterations,
                stiffness=point.stiffness,
            )

            u, lam = increment.u, increment.lam
            previous = (increment.du, increment.dlam)
            if settings.max_load is not None and lam >= settings.max_load:
                break
            if settings.adapt:
                factor = np.sqrt(settings.target_iterations / max(increment.iterations, 1))
                arc_length = float(np.clip(arc_length * factor, floor, ceiling))
        return path


def arc_length(
    problem: EquilibriumProblem,
    settings: Optional[ArcLengthSettings] = None,
    monitor: Optional[Monitor] = None,
    u0: Optional[np.ndarray] = None,
) -> ContinuationPath:
    """Run Crisfield continuation from u0 (default zero) at lambda = 0."""
    return ArcLengthSolver(problem, settings, monitor).run(u0)
