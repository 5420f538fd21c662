import subprocess
import sys


def test_main():
    subprocess.check_call([sys.executable, "-m", "wulink", "--help"])


def test_generate_to_stdout():
    output = subprocess.check_output([sys.executable, "-m", "wulink", "generate", "sphere", "1"])
    assert output.startswith(b'{"name": "S1"')
