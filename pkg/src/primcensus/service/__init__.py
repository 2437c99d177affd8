from .census_service import CensusService, run

__all__ = ['CensusService', 'run']
