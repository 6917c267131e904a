"""Matching with unidirectional substitutes and complements."""
from .conditions import (
    COMPLEMENT,
    SUBSTITUTE,
    ConditionReport,
    RelationWitness,
    Verdict,
    condition_report,
    demand_type,
    find_relation,
    integer_determinant,
    is_complement,
    is_substitute,
    max_minor_determinant_exceeds_unit,
    satisfies_sscc,
    satisfies_substitutes,
    satisfies_substitutes_classical,
    satisfies_usc,
)
from .core import (
    NULL,
    ChoiceFunction,
    EnumerationLimitError,
    Market,
    Matching,
    RankedChoice,
    available_set,
    choose,
    mask_of,
    members,
    validate_instance,
)
from .generate import GeneratorConfig, SamplingBudgetExhausted, generate_usc_instance, random_instances
from .instance import (
    InstanceDocument,
    InstanceError,
    QuasilinearBlock,
    fixture_names,
    load_fixture,
    load_instance,
    matching_to_dict,
    parse_instance,
    parse_matching,
    serialize_instance,
)
from .mechanisms import (
    LateRejection,
    MechanismTrace,
    coarsen,
    multi_stage_da,
    one_stage_da,
    render_trace,
    worker_proposing_da,
)
from .quasilinear import (
    PriceWitness,
    Valuation,
    cross_effect_free,
    demand,
    demanded_profile,
    detect_ql_relation,
    is_demanded,
    relation_table,
    salaries,
    verify_theorem3,
)
from .school import SchoolRule, proof_clauses, school_choose, verify_theorem2
from .stability import (
    BlockingCoalition,
    blocks,
    enumerate_stable_matchings,
    find_blocking_coalition,
    is_individually_rational,
    is_stable,
)

__version__ = "0.1.0"
