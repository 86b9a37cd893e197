"""Lüders updates, observable compatibility and state-updating underlying-state models."""

__version__ = "0.1.0"

from .errors import (CapacityError, DimensionError, IncompatibleScenarioError,  # noqa: E402
                     NoObstructionError, NoWitnessError, NumericError, ScenarioFormatError,
                     UndefinedUpdateError, UnderlyingStatesError, UnknownOutcomeError,
                     ValidationError)
from .spectral import (HermitianObservable, orthocomplement_projector, projector,  # noqa: E402
                       spectral_decompose, validate_hermitian)
from .states import (DensityOperator, Proposition, PureState, born_probability,  # noqa: E402
                     joint_table, luders_update_density, luders_update_pure,
                     mixture_update_weights, sequential_distribution, sequential_joint)
from .compatibility import (CompatReport, Witness, commutator_test, find_witness,  # noqa: E402
                            order_independence_test, rehder_test, scenario_pairwise_check)
from .model import (SampleSpace, UnderlyingMeasure, UnderlyingModel, build_measure,  # noqa: E402
                    build_model, build_sample_space, condition_measure,
                    demonstrate_obstruction, verify_born_agreement, verify_model_laws,
                    verify_update_diagram)
from .scenario import (Scenario, generate_random_scenario, generate_wave_demo,  # noqa: E402
                       load_scenario, parse_scenario)
from .runner import RunReport, run_check  # noqa: E402
from .estimator import UnderlyingStateModel  # noqa: E402
