from pkg_resources import DistributionNotFound, require

from vvo_manager.conf import settings


def get_version() -> str:
    try:
        return require(settings.PYTHON_PACKAGE_NAME)[0].version
    except DistributionNotFound:
        return "unknown (not installed)"


def show_version():
    print("VVO manager version {}".format(get_version()))
