from os import replace, unlink, walk
from os.path import abspath, dirname, isfile, join
from logging import getLogger
from tempfile import NamedTemporaryFile
from typing import List

from yaml import safe_load

logger = getLogger(__name__)


def _check_exists(path: str):
    if not isfile(path):
        logger.error("File {} does not exist".format(path))
        raise IOError("File {} does not exist".format(path))


def get_yaml_content(path: str) -> dict:
    """
    Loads a YAML run spec and returns the contents
    :param str path: The YAML file to load
    :return: dict: The YAML file contents
    """
    _check_exists(path)
    logger.debug("Loading YAML values from {}".format(path))
    with open(path, "r") as fh:
        content = safe_load(fh)
    return content if content is not None else {}


def read_file_content(path: str) -> str:
    """
    :param str path: The text file to read
    :return: str: The file contents
    """
    _check_exists(path)
    logger.debug("Reading {}".format(path))
    with open(path, "r") as fh:
        return fh.read()


def write_file_atomically(path: str, content: str):
    """
    Write a file next to its destination and rename it into place, so readers never see a partial file
    :param str path: The filepath to write the file to
    :param str content: The content to write to the file
    """
    logger.debug("Writing content to {}".format(path))
    directory = dirname(abspath(path))
    with NamedTemporaryFile("w", dir=directory, prefix=".vvo-", suffix=".tmp", delete=False) as fh:
        temporary = fh.name
        try:
            fh.write(content)
        except BaseException:
            fh.close()
            unlink(temporary)
            raise
    replace(temporary, path)


def get_yaml_files_from_disk_path(path: str, excludes_files: List[str] = None) -> List[str]:
    """
    Returns a list of yaml files from a path (recursive search)
    :param path: str: The path to search in
    :param excludes_files: list: Of filenames to exclude
    :return: list of paths: the found yaml files
    """

    def should_be_excluded(root_path, file):
        if excludes_files:
            return file in excludes_files or join(root_path, file) in excludes_files
        return False

    yaml_files = []
    logger.debug("Retrieving yaml files from path: {}".format(path))
    for root, _, files in walk(path):
        for f in files:
            if f.endswith((".yaml", ".yml")) and not should_be_excluded(root, f):
                yaml_files.append(join(root, f))
    return yaml_files
