#!/usr/bin/env python
from logging import getLogger, DEBUG
from argparse import ArgumentParser
from os.path import join
from yamllint.config import YamlLintConfig
from yamllint.cli import show_problems
from yamllint import linter
from typing import List

from vvo_manager.conf import settings
from vvo_manager.config.config import get_run_spec
from vvo_manager.config.validate import ValidateRunSpec
from vvo_manager.log import setup_console_logging
from vvo_manager.utils.files import get_yaml_files_from_disk_path


logger = getLogger("tools.yaml_syntax_validator")


def check_yaml_file_syntax(files: List[str]) -> int:
    """
    Check each file with yamllint and print the errors if any
    :param files: The files to put through yamllint
    :return: int: The amount of lint errors encountered
    """
    errors = 0
    config = YamlLintConfig(file=settings.YAMLLINT_CONFIG_FILE)
    for file_path in files:
        try:
            with open(file_path, "r") as f:
                gen = linter.run(f, config)
                problems = list(gen)
                if problems:
                    errors += 1
                    show_problems(problems, file_path, "colored", False)
        except IOError:
            logger.error("ERROR: Could not open {} for yaml syntax checking".format(file_path))
            errors += 1
    return errors


def check_run_specs(files: List[str]) -> int:
    """
    Put each run spec through ValidateRunSpec, specs without a case are checked against the bundled 4 bus case
    :param files: The run specs to validate
    :return: int: The amount of run specs that did not validate
    """
    errors = 0
    for file_path in files:
        config = get_run_spec(file_path)
        config.setdefault("case", join(settings.CASE_FILE_DIR, "case4_vvo.m"))
        validator = ValidateRunSpec(config)
        validator.validate()
        if not validator.config_validation_successful:
            logger.error("Run spec {} did not validate".format(file_path))
            errors += 1
    return errors


def main():
    """
    This script checks every example run spec with yamllint and validates its contents.
    A valid yamllint config file should be present in YAMLLINT_CONFIG_FILE
    """
    setup_console_logging(verbosity=DEBUG)
    parser = ArgumentParser(description="Verify (example) run specs for valid YAML syntax and contents")
    parser.parse_args()

    yaml_files = get_yaml_files_from_disk_path(settings.CONFIG_FILE_DIR)
    errors = check_yaml_file_syntax(yaml_files)
    errors += check_run_specs(yaml_files)

    logger.debug("#" * 80)
    if errors:
        logger.info("{} files have issues, please fix them before proceeding".format(errors))
    else:
        logger.info("No yamllint or run spec errors encountered, nice :)")
    logger.debug("#" * 80)

    exit(1 if errors else 0)


if __name__ == "__main__":
    main()
