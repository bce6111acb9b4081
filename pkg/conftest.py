import os

# Mirror the tox setenv so plain pytest runs load the test settings
os.environ.setdefault("SETTINGS_MODULE", "vvo_manager.settings.test")
