import os

from dotenv import load_dotenv

load_dotenv()

# Network defaults
NUM_LAYERS = 3
HIDDEN_SIZE = 512
INPUT_CHANNELS = 140
NUM_CLASSES = 35
BETA = 0.33
D_MAX = 15
U_TH = 1.0
SURROGATE_SLOPE = 5.0
DROPOUT = 0.25

D_MAX_GRID = [5, 11, 15, 31, 35, 41]

# Training defaults
EPOCHS = 100
BATCH_SIZE = 512
LR_WEIGHTS = 1e-3
LR_DELAYS = 0.1
WEIGHT_SCHEDULER = "one_cycle"
DELAY_SCHEDULER = "cosine"

SIGMA_FINAL = 0.5
SIGMA_ANNEAL_FRACTION = 0.25

# Closing share of epochs trained on rounded delays (straight-through kernels)
ROUNDED_FINETUNE_FRACTION = 0.2

ONE_CYCLE_WARMUP = 0.3
ONE_CYCLE_INITIAL_DIV = 25.0
ONE_CYCLE_FINAL_DIV = 100.0

BN_EPS = 1e-5
BN_MOMENTUM = 0.1

# Firing-rate regularization used for the regularization sweep
REG_ALPHA_MIN = 0.001
REG_STRENGTH = 0.5

# Buffer model
STATE_BITS = 16
WEIGHT_BITS = 16
RHO_N = 1.0
RHO_P = 0.2

# Files
CONFIG_SNAPSHOT_FILE = "config.resolved.json"
CHECKPOINT_FILE = "checkpoint.pt"
METRICS_FILE = "metrics.csv"
SWEEP_FILE = "sweep.csv"
PROGRESS_FILE = "progress.json"
CHECKPOINT_FORMAT_VERSION = 1
EVENT_FILE_VERSION = 1
MAX_DENSE_EVENT_CELLS = int(os.getenv("DELAYSNN_MAX_DENSE_CELLS", str(2**32)))

LOG_LEVEL = os.getenv("DELAYSNN_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("DELAYSNN_LOG_FILE", "log.txt")
NUM_THREADS = int(os.getenv("DELAYSNN_THREADS", "1"))


def get_sweep_progress_file(out_dir):
    return os.path.join(out_dir, PROGRESS_FILE)
