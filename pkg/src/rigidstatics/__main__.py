"""Module entry point: python -m rigidstatics ..."""

from .cli import main

if __name__ == "__main__":
    main()
