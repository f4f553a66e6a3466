from setuptools import setup

setup(
	name='rlcommunity',
	version='0.1.0',
	author='rlcommunity developers',
	packages=['rlcommunity', 'rlcommunity.detectors'],
	description='A SARSA agent that learns which community detector to run on growing graphs.',
	install_requires=[
		'numpy >= 1.22.2',
		'scipy >= 1.6.2',
		'torch >= 1.9.0',
		'pandas >= 1.5.0',
		'pyyaml >= 5.4'
	],
	entry_points={
		'console_scripts': ['rlcommunity=rlcommunity.__main__:main']
	}
)
