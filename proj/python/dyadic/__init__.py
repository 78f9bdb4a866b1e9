"""Dyadic shell model: shell ODE, self-similar profiles and invariant curves."""

from ._core import (
    AlphaSolution,
    BoundForm,
    Chart,
    ContractionViolation,
    DomainError,
    InvariantCurve,
    KolmogorovFit,
    ModelParams,
    NoIntersection,
    NumericalError,
    OrbitClass,
    Profile,
    Rectangle,
    ValidationError,
    Verdict,
    certify_rectangle,
    classify_orbit,
    decay_rate,
    energy,
    error_term,
    find_intersection,
    fit_kolmogorov,
    forced_fixed_point,
    generate_profile,
    integrate,
    map_F,
    min_R0,
    next_alpha,
    quadratic_oracle,
    rhs,
    solve_alpha0,
    solve_invariant,
)

__all__ = [name for name in dir() if not name.startswith("_")]
