from unittest import TestCase, mock
from pathlib import Path

import numpy as np

from vvo_manager.conf import settings
from vvo_manager.network.model import STATE_FIELDS


class VVOTestCase(TestCase):
    def __init__(self, *args, **kwargs):
        self.expected_setup_path = Path(settings.PROJECT_DIR, "setup.py")
        self.assertTrue(self.expected_setup_path.is_file(), "project_path is not correct? (no setup.py found)")
        super(VVOTestCase, self).__init__(*args, **kwargs)

    def set_up_patch(self, topatch, themock=None, **kwargs):
        """
        Patch a function or class
        :param topatch: string The class to patch
        :param themock: optional object to use as mock
        :param kwargs: attributes to configure on the mock, like return_value or side_effect
        :return: mocked object
        """
        if themock is None:
            themock = mock.Mock()

        if kwargs:
            themock.configure_mock(**kwargs)

        patcher = mock.patch(topatch, themock)
        self.addCleanup(patcher.stop)
        return patcher.start()

    def set_up_context_manager_patch(self, topatch, themock=None, **kwargs):
        """
        Provides a mock object which can be used with context managers (like with statements)
        """
        patcher = self.set_up_patch(topatch, themock=themock, **kwargs)
        patcher.return_value.__exit__ = lambda a, b, c, d: None
        patcher.return_value.__enter__ = patcher
        return patcher

    def assertStatesClose(self, actual, expected, atol: float = 1e-9):  # pylint: disable=invalid-name
        """
        Compare two OperatingStates vector by vector, the failure names the first vector that differs
        """
        for name in STATE_FIELDS:
            np.testing.assert_allclose(
                getattr(actual, name), getattr(expected, name), rtol=0, atol=atol, err_msg="state vector {}".format(name)
            )
