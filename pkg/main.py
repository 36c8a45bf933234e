#!/usr/bin/env python3
"""
Grid Factor Engine - Main Entry Point
Sets up the import path, checks dependencies and hands over to the command layer.
Results go to stdout; diagnostics go to stderr.
"""

import sys
from pathlib import Path

REQUIRED = ("numpy", "networkx", "packaging")


def setup_environment():
    """Put the src directory on the Python path"""
    current_dir = Path(__file__).parent
    src_path = current_dir / "src"

    if src_path.exists():
        sys.path.insert(0, str(src_path))
    else:
        print(f"WARNING: src directory not found at {src_path}", file=sys.stderr)
        sys.path.insert(0, str(current_dir))


def check_dependencies(verbose: bool = False) -> bool:
    """Check that the runtime dependencies import"""
    missing_deps = []

    for name in REQUIRED:
        try:
            __import__(name)
            if verbose:
                print(f"✓ {name} available", file=sys.stderr)
        except ImportError as e:
            print(f"✗ {name} not available: {e}", file=sys.stderr)
            missing_deps.append(name)

    if missing_deps:
        print(f"\nMissing dependencies: {missing_deps}", file=sys.stderr)
        print("Please install them with:", file=sys.stderr)
        print("pip install " + " ".join(missing_deps), file=sys.stderr)
        return False
    return True


def main() -> int:
    """Main entry point with top-level error handling"""
    setup_environment()

    if not check_dependencies(verbose="--verbose" in sys.argv):
        return 1

    try:
        from main_application import main as app_main
        return app_main(sys.argv[1:])

    except ImportError as e:
        print(f"Import Error: {e}", file=sys.stderr)
        return 1

    except Exception as e:
        print(f"Fatal error: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
