"""V2X vehicular positioning: waveform ranging and hidden-vehicle multipath geometry."""

from .channel import ArrayConfig, ChannelTap, LinkBudget, pathloss_db, propagate, rss_scan
from .errors import PositioningError
from .hvp import (
    ClassifyConfig,
    PositionFix,
    classify_and_solve,
    implied_scatterer,
    locus_line,
    solve_linear,
    solve_multi_epoch,
    solve_trajectory,
)
from .ranging import TonePair, equalize_tones, pdoa_estimate, pdoa_hierarchical, toa_estimate
from .scenario import (
    C,
    EpochObservation,
    PathObservation,
    Point2D,
    Scenario,
    ego_translate,
    enumerate_paths,
    random_scenario,
)
from .waveform import OfdmConfig, Waveform, gen_ofdm_reference, gen_two_tone

__version__ = "0.1.0"
