import sys

from dotenv import load_dotenv

from src.cli_runner.main import run

# Load environment variables from .env file
load_dotenv()


def main() -> int:
    """
    Entry point of the Hartree wave lab: dispatches a subcommand such as
    `python main.py dump-renorm --N 1 --beta 1`.
    """
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
