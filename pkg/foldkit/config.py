from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    debug: bool = False
    app_name: str = "foldkit"
    log_level: str = "INFO"

    # joblib workers for restarts, LOOCV folds and Monte-Carlo replications
    n_jobs: int = 1

    # Numerical tolerances
    rank_tol: float = 1e-10
    singular_tol: float = 1e-12
    symmetry_tol: float = 1e-8

    # Alternating least squares defaults
    rel_tol: float = 1e-9
    abs_tol: float = 1e-24
    max_iters: int = 500
    restarts: int = 5

    # Simulation defaults
    benchmark_reps: int = 10000
    mixture_mu: float = 1.7

    model_config: SettingsConfigDict = SettingsConfigDict(
        env_file=".env",
        env_prefix="FOLDKIT_",
        case_sensitive=False,
        extra="ignore",
    )

settings = Settings()
