"""Hammersley-Aldous-Diaconis particle systems: configurations, queueing
maps between multi-line and multiclass states, Harris-construction
dynamics, coloured couplings and seeded statistical experiments."""
from .core import (
    CYCLE,
    INTERVAL,
    Configuration,
    Geometry,
    PointField,
    RngStream,
    nearest_left,
    nearest_right,
    sample_configuration,
    sample_point_field,
)
from .dynamics import (
    Trajectory,
    coupled_step,
    evolve,
    had_reverse_step,
    had_step,
    multiclass_step,
    multiline_reverse_step,
    multiline_step,
)
from .errors import *  # noqa: F401,F403
from .queueing import (
    CoupledConfig,
    FifoMatching,
    MulticlassConfig,
    MultiLineConfig,
    QueueTrajectory,
    build_coupled,
    class_departures,
    collapse_classes,
    expand_classes,
    fifo_links,
    map_multiclass,
    queue_trajectory,
    split_departures_unused,
    tandem_departures,
)

__version__ = "0.1.0"
