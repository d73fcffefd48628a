"""
🔭 bngraph - Main Entry Point
Divisor theory on finite multigraphs from the command line
"""

import logging
import os
import sys

from dotenv import load_dotenv

from app.cli.commands import run

# Load environment variables
load_dotenv()

logging.basicConfig(
    level=os.getenv("BNGRAPH_LOG_LEVEL", "INFO").upper(),
    format="%(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


if __name__ == "__main__":
    sys.exit(run())
