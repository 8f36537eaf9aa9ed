import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

class Settings:
    # App settings
    APP_NAME = os.getenv("APP_NAME", "contlogic")
    APP_VERSION = os.getenv("APP_VERSION", "0.1.0")
    DEBUG = os.getenv("DEBUG", "False").lower() == "true"

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING").upper()
    LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Reports
    REPORT_SCHEMA_VERSION = 1
    REPORT_INDENT = 2

    # Expansion settings
    DISTANCE_SYMBOL = os.getenv("DISTANCE_SYMBOL", "D")
    SEQUENCE_FRAME = ("x", "y")

    # Canonical formula family
    FORMULA_VARIABLES = ("x", "y")
    FORMULA_CONSTANTS = ("0", "1/2", "1")
    FORMULA_LEVEL_WIDTH = int(os.getenv("FORMULA_LEVEL_WIDTH", "120"))

    # Evaluation
    EVALUATOR_MEMO_LIMIT = int(os.getenv("EVALUATOR_MEMO_LIMIT", "200000"))

    # Command defaults
    DEFAULT_DEPTH = int(os.getenv("DEFAULT_DEPTH", "2"))
    DEFAULT_GRID = int(os.getenv("DEFAULT_GRID", "4"))  # 2^2
    DEFAULT_SAMPLES = int(os.getenv("DEFAULT_SAMPLES", "50"))
    DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))

    # Random structure generation
    RANDOM_MAX_PREDICATES = 4
    RANDOM_MAX_ARITY = 3
    RANDOM_MAX_UNIVERSE = 6
    RANDOM_DENOMINATOR = 16

settings = Settings()
