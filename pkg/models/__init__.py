"""
Pydantic data models for mimolab.

This package contains type-safe data structures for:
- Channel core (arrays, paths, frequency grid, snapshots, bases)
- CSI codebooks and precoder reports
- SRS sounding
- CSI prediction
- Multi-TRP evaluation and DMRS multiplexing
- Beam indication
- Experiment configuration and result tables
"""

from .channel import (
    ArrayConfig,
    PathCluster,
    FrequencyGrid,
    ChannelSnapshot,
    BasisPair,
    ChannelProcess,
)
from .codebook import (
    Type1Config,
    EType2Config,
    CjtConfig,
    DopplerConfig,
    Coefficient,
    ReportBlock,
    PrecoderReport,
    Type1Result,
)
from .srs import (
    SrsSequence,
    CsSchedule,
    SrsObservation,
    DelayProfile,
    SrsResourceMap,
    SrsAssignment,
    ChannelEstimate,
)
from .prediction import PredictionConfig, DopplerTrack
from .evaluation import (
    DropParams,
    FeedbackSettings,
    DropScenario,
    SinrScenario,
    BurstRecord,
    OccConfig,
    OccEstimate,
    WeightedCsiRsPrecoder,
    UeResult,
    DropResult,
)
from .beams import (
    Trajectory,
    BeamGrid,
    IndicationModel,
    BeamScenario,
    BeamSample,
    EmpiricalCdf,
)
from .experiment import SCHEMAS, ExperimentConfig, ResultTable

__all__ = [
    # Channel core
    "ArrayConfig",
    "PathCluster",
    "FrequencyGrid",
    "ChannelSnapshot",
    "BasisPair",
    "ChannelProcess",
    # Codebooks
    "Type1Config",
    "EType2Config",
    "CjtConfig",
    "DopplerConfig",
    "Coefficient",
    "ReportBlock",
    "PrecoderReport",
    "Type1Result",
    # SRS
    "SrsSequence",
    "CsSchedule",
    "SrsObservation",
    "DelayProfile",
    "SrsResourceMap",
    "SrsAssignment",
    "ChannelEstimate",
    # Prediction
    "PredictionConfig",
    "DopplerTrack",
    # Evaluation
    "DropParams",
    "FeedbackSettings",
    "DropScenario",
    "SinrScenario",
    "BurstRecord",
    "OccConfig",
    "OccEstimate",
    "WeightedCsiRsPrecoder",
    "UeResult",
    "DropResult",
    # Beam indication
    "Trajectory",
    "BeamGrid",
    "IndicationModel",
    "BeamScenario",
    "BeamSample",
    "EmpiricalCdf",
    # Experiments
    "SCHEMAS",
    "ExperimentConfig",
    "ResultTable",
]
