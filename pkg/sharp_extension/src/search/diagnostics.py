"""Diffuse-versus-concentrating classification of a sequence of iterates."""

import logging
from typing import Sequence

from ..caps.profiles import concentration_metric, upper_profile
from ..fields.arc_function import ArcFunction
from ..models.results import SequenceReport
from ..models.specs import Cap

logger = logging.getLogger(__name__)

DEFAULT_R_VALUES = (1.0, 2.0, 4.0, 8.0)


def sequence_diagnostics(
    fs: Sequence[ArcFunction],
    R_values: Sequence[float] = DEFAULT_R_VALUES
) -> SequenceReport:
    """
    Classify a sequence as diffuse or concentrating at a point of the arc.

    The concentration metric decides the class; the upper profile of the
    last function is taken relative to its best cap of the smallest radius.

    Args:
        fs: At least three functions on a common arc
        R_values: Tail thresholds for the upper profile

    Returns:
        SequenceReport; for a concentrating run the concentration block
        carries the point, kappa there and the kappa = lambda flag
    """
    if len(fs) < 3:
        raise ValueError(f"sequence diagnostics need at least three functions, got {len(fs)}")
    concentration = concentration_metric(fs)
    cap = Cap(center=concentration.center, radius=concentration.radii[-1])
    profile = upper_profile(fs[-1], cap, R_values)
    classification = "concentrating" if concentration.concentrated else "diffuse"
    logger.info(
        f"sequence of {len(fs)} functions is {classification}"
        + (f" at s={concentration.center:.5g} (kappa = lambda: {concentration.at_curvature_minimum})"
           if concentration.concentrated else "")
    )
    return SequenceReport(
        classification=classification,
        concentration=concentration,
        tail_height=profile.tail_height,
        tail_space=profile.tail_space,
        R_values=profile.R_values,
    )
