"""Column indices of the MATPOWER case tables (0-based)"""

# bus types
PQ, PV, REF, NONE = 1, 2, 3, 4

# mpc.bus
BUS_I = 0
BUS_TYPE = 1
PD = 2
QD = 3
GS = 4
BS = 5
BUS_AREA = 6
VM = 7
VA = 8
BASE_KV = 9
ZONE = 10
VMAX = 11
VMIN = 12
BUS_COLUMNS = 13

# mpc.gen
GEN_BUS = 0
PG = 1
QG = 2
QMAX = 3
QMIN = 4
VG = 5
MBASE = 6
GEN_STATUS = 7
PMAX = 8
PMIN = 9
GEN_COLUMNS = 10

# mpc.branch
F_BUS = 0
T_BUS = 1
BR_R = 2
BR_X = 3
BR_B = 4
RATE_A = 5
RATE_B = 6
RATE_C = 7
TAP = 8
SHIFT = 9
BR_STATUS = 10
ANGMIN = 11
ANGMAX = 12
BRANCH_COLUMNS = 11

# mpc.gencost
MODEL = 0
STARTUP = 1
SHUTDOWN = 2
NCOST = 3
COST = 4
PW_LINEAR = 1
POLYNOMIAL = 2
