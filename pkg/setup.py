from setuptools import setup, find_packages

setup(name='taper-sfwm',
      version='1.0',
      packages=find_packages(exclude=['tests']),
      install_requires=['numpy', 'scipy', 'h5py', 'matplotlib'])
