"""Group-testing readout designs for single-photon pixel arrays.

Wires t time-to-digital converters to n pixels through a d-disjunct
binary code so that any window with at most d simultaneous firings
decodes uniquely, with t growing like d^2 log n instead of the 2*sqrt(n)
of a cross-strip wiring.
"""

from .binmat import (
    BinaryCode,
    CodeMeta,
    GtmxError,
    TestVector,
    covers,
    load,
    loads,
    max_overlap,
    reference_design,
    save,
    superimpose,
)
from .bounds import BoundResult, sandwich_ok, table3, to_tsv
from .construct import (
    PrimePowerSet,
    build_recipe,
    catalog_descriptor,
    concat_identity,
    concat_inner,
    crt_sieve,
    extend_greedy,
    greedy_construct,
    import_code,
    inner_affine_lines,
    parse_recipe,
    shorten_weight,
    shorten_zero,
)
from .decode import (
    DecodeKind,
    DecodeOutcome,
    TdcStream,
    burst_decode,
    cover_decode,
    lookup_decode_1,
    window_decode,
)
from .gf import FieldSpec, QaryCode, field_make, rs_code
from .sim import (
    FiringTrace,
    PhotonList,
    ScintParams,
    SensorParams,
    SimStats,
    detect,
    gen_events,
    random_support_success,
    run,
    sweep,
)
from .verify import (
    Verdict,
    VerdictKind,
    check_overlap_certificate,
    check_separable,
    exact_check,
    naive_check,
    random_check,
)

__version__ = "0.1.0"
