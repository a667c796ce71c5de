"""Two-class EEG analysis: AR spectra, discriminability, directed coupling.

The package covers two analysis tracks over epoched multichannel signals.
The spectral track fits per-channel Burg AR models, maps class contrast as
r-squared per channel and frequency, and cross-validates an RBF-kernel SVM
on the selected band. The coupling track fits per-epoch multichannel AR
models, computes normalized directed-coherence tensors, screens every
ordered channel pair with rank-sum tests, and reduces the survivors to
inflow/outflow maps. A synthetic generator with known ground truth backs
the end-to-end tests.
"""

from .backend import BACKEND, available_backends
from .connectivity import (FlowMap, PdcTensor, band_indices,
                           band_median_pdc, flow_map, pdc, transfer_matrix)
from .errors import (ContractError, DegenerateSignalError, DesignError,
                     EpochingError, FeatureSelectionWarning, FormatError,
                     IoError, LengthError, NumericalError, ParseError,
                     PdcmiError, RangeError, SingularityError,
                     StabilityError)
from .io import (CLASS1, CLASS2, DEFAULT_CHANNEL_NAMES, Epoch, EpochSet,
                 Recording, TrialMark, load_matrix, load_recording,
                 save_matrix, save_recording, segment_epochs)
from .mvar import (BurgModel, MvarModel, burg_fit, burg_psd, fit_mvar,
                   mvar_from_dict, mvar_to_dict, select_order_aic,
                   select_order_reflection)
from .preprocess import (IirFilter, PreprocessSettings, design_bandpass,
                         design_notch, filtfilt, preprocess_recording)
from .stats import (Edge, EdgeSignificance, FeatureSpec, RSquaredMap,
                    ranksum, rsquared, rsquared_map, screen_edges,
                    select_features)
from .svm import (CvResult, SvmModel, build_feature_vectors,
                  cross_validate, rbf_kernel_matrix, stratified_split,
                  svm_decision, svm_predict, svm_train)
from .synth import (Coupling, GroundTruth, ScenarioConfig, check_stability,
                    companion_matrix, coupling_edges_of, edge_scenario,
                    generate, make_two_class_scenario, rhythm_scenario,
                    scenario_model, stable_random_model)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "available_backends",
    "FlowMap", "PdcTensor", "band_indices", "band_median_pdc", "flow_map",
    "pdc", "transfer_matrix",
    "ContractError", "DegenerateSignalError", "DesignError",
    "EpochingError", "FeatureSelectionWarning", "FormatError", "IoError",
    "LengthError", "NumericalError", "ParseError", "PdcmiError",
    "RangeError", "SingularityError", "StabilityError",
    "CLASS1", "CLASS2", "DEFAULT_CHANNEL_NAMES", "Epoch", "EpochSet",
    "Recording", "TrialMark", "load_matrix", "load_recording",
    "save_matrix", "save_recording", "segment_epochs",
    "BurgModel", "MvarModel", "burg_fit", "burg_psd", "fit_mvar",
    "mvar_from_dict", "mvar_to_dict", "select_order_aic",
    "select_order_reflection",
    "IirFilter", "PreprocessSettings", "design_bandpass", "design_notch",
    "filtfilt", "preprocess_recording",
    "Edge", "EdgeSignificance", "FeatureSpec", "RSquaredMap", "ranksum",
    "rsquared", "rsquared_map", "screen_edges", "select_features",
    "CvResult", "SvmModel", "build_feature_vectors", "cross_validate",
    "rbf_kernel_matrix", "stratified_split", "svm_decision", "svm_predict",
    "svm_train",
    "Coupling", "GroundTruth", "ScenarioConfig", "check_stability",
    "companion_matrix", "coupling_edges_of", "edge_scenario", "generate",
    "make_two_class_scenario", "rhythm_scenario", "scenario_model",
    "stable_random_model",
    "__version__",
]
