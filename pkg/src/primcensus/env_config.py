import os
from dotenv import load_dotenv

load_dotenv()

# Worker pool size; beats Config.yml, loses to --workers
PRIMCENSUS_WORKERS = os.getenv("PRIMCENSUS_WORKERS")

# Alternative Config.yml
PRIMCENSUS_CONFIG = os.getenv("PRIMCENSUS_CONFIG")

# Logging
PRIMCENSUS_LOG_LEVEL = os.getenv("PRIMCENSUS_LOG_LEVEL")
