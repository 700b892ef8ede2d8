import sys

from zoomlens.boot import boot


def main() -> None:
    sys.exit(boot())


if __name__ == "__main__":
    main()
