if __name__ == "__main__":
    import sys

    from toric_chow.cli import app

    sys.exit(app())
