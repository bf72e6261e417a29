# Exact arithmetic chains (mass sums, closed-form identities).
EXACT_TOL = 1e-12
# Checks that go through normalization relabeling or integral/closed-form pairs.
NORMALIZED_TOL = 1e-10
# Conditioning masses at or below this make a parameter undefined.
MASS_THRESHOLD = 1e-12
# First stage: propensity range must exceed this.
FIRST_STAGE_TOL = 1e-10
# Minimum |estimand - parameter| for a converse counterexample.
CONVERSE_GAP = 0.05

DEFAULT_BOOTSTRAP = 199
REPORT_SCHEMA_VERSION = 1
