from contextBell.modules.cli import cli
from contextBell.utils.logger_config import logger

if __name__ == "__main__":
    logger.info("contextBell started from main.py")

    # Same entry point as the installed `contextbell` console script
    cli(prog_name="contextbell")
