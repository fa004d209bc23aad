"""actforge: controllable user dialogue act augmentation for task-oriented corpora."""

__version__ = "0.1.0"

from .actgen import (
    AugConfig,
    TurnContext,
    apply_coreference,
    compose_turn,
    generate_confirm,
    generate_inform,
    generate_reply,
    generate_user_act,
    turn_rng,
)
from .augment import (
    AugDeps,
    AugRecord,
    AugStats,
    augment_corpus,
    augment_turn,
    records_to_corpus,
    substitute_corpus,
    value_substitution,
)
from .corpus import (
    ActItem,
    CorefList,
    Corpus,
    CorpusError,
    Dialogue,
    SlotValueDict,
    SystemAct,
    Turn,
    UserAct,
    Violation,
    bundled_coref_list,
    bundled_dictionary,
    bundled_mini_corpus,
    load_coref_list,
    load_corpus,
    load_dictionary,
    validate_corpus,
    write_corpus,
)
from .filtering import (
    FilterDeps,
    FilterVerdict,
    check_appearance,
    check_consistency,
    classify_remote,
    filter_candidates,
    gate_rule,
)
from .genbridge import (
    CandidateSet,
    ExternalGenerator,
    GenRequest,
    PhraseLexicon,
    ProtocolError,
    realize_template,
    request_external,
)
from .metrics import (
    DistributionReport,
    categorize_slot,
    joint_goal_accuracy,
    load_predictions,
    slot_class_f1,
    slot_distribution,
)
