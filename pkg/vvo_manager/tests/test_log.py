import logging
from argparse import ArgumentParser

from vvo_manager.log import setup_console_logging, get_logging_verbosity
from vvo_manager.tests import VVOTestCase
from vvo_manager.conf import settings


def my_test_args(args):
    parser = ArgumentParser()
    parser.add_argument("-q", "--quiet", action="count", default=0)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser.parse_args(args=args)


class TestGetLoggingVerbosity(VVOTestCase):
    def test_get_logging_verbosity_never_returns_higher_number_then_defined_verbs(self):
        args = my_test_args(["-vvvvvvvvvvv", "--verbose", "-v"])
        self.assertEqual(get_logging_verbosity(args), logging.DEBUG)

    def test_get_logging_verbosity_never_returns_lower_number_then_defined_verbs(self):
        args = my_test_args(["-qqqqqqqqqqq", "--quiet", "-q"])
        self.assertEqual(get_logging_verbosity(args), logging.CRITICAL)

    def test_get_logging_verbosity_return_error_level_if_two_quiets_passed(self):
        args = my_test_args(["--quiet", "-q"])
        self.assertEqual(get_logging_verbosity(args), logging.ERROR)

    def test_get_logging_verbosity_returns_info_by_default(self):
        self.assertEqual(get_logging_verbosity(my_test_args([])), logging.INFO)


class TestSetupConsoleLogging(VVOTestCase):
    def setUp(self) -> None:
        self.dict_config = self.set_up_patch("vvo_manager.log.logging.config.dictConfig")

    def config(self) -> dict:
        return self.dict_config.call_args[0][0]

    def test_setup_console_logging_sets_up_INFO_logging_by_default(self):
        setup_console_logging()
        self.assertEqual(self.config()["handlers"]["console"]["level"], logging.INFO)

    def test_setup_console_logging_sets_up_passed_logging_level(self):
        setup_console_logging(logging.DEBUG)
        self.assertEqual(self.config()["handlers"]["console"]["level"], logging.DEBUG)

    def test_setup_console_logging_does_not_modify_the_settings(self):
        setup_console_logging(logging.DEBUG, solver_log=True)
        self.assertNotIn("level", settings.LOGGING["handlers"]["console"])
        self.assertEqual(settings.LOGGING["loggers"][settings.SOLVER_LOGGER_NAME]["level"], "INFO")

    def test_setup_console_logging_keeps_the_solver_quiet_by_default(self):
        setup_console_logging()
        self.assertEqual(self.config()["loggers"][settings.SOLVER_LOGGER_NAME]["level"], "INFO")

    def test_setup_console_logging_enables_solver_iteration_logs(self):
        setup_console_logging(solver_log=True)
        self.assertEqual(self.config()["loggers"][settings.SOLVER_LOGGER_NAME]["level"], "DEBUG")
