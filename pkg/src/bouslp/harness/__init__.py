from bouslp.harness.checks import (  # noqa: F401
    CHECKS,
    CheckContext,
    EnergySeriesObserver,
    fitted_band_decay_rate,
    fitted_mode_decay_exponent,
    run_checks,
    run_inequality_check,
)
from bouslp.harness.experiments import (  # noqa: F401
    ApproximationResult,
    PerturbationSpec,
    TwinRunResult,
    approximation_experiment,
    flow_composition_check,
    uniqueness_experiment,
)
from bouslp.harness.osgood import (  # noqa: F401
    OsgoodProblem,
    fit_envelope_constant,
    osgood_integrate,
)
from bouslp.harness.records import (  # noqa: F401
    EstimateRecord,
    read_records_csv,
    summary_dict,
    write_records_csv,
    write_summary_json,
)
