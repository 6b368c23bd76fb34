from typing import Optional

from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, confloat, conint, root_validator

from sdpkit.impl import EnumNameHyphenCase


class OptionsBase(BaseModel):
    class Config:
        extra = "forbid"
        allow_mutation = False


class SolveOptions(OptionsBase):
    tol: PositiveFloat = Field(1e-7, description="Relative duality gap target.")
    feas_tol: PositiveFloat = Field(1e-8, description="Relative primal and dual residual target.")
    max_iter: PositiveInt = Field(200, description="Maximum amount of interior point iterations.")
    step_fraction: confloat(gt=0, lt=1) = Field(0.95, description="Fraction of the step to the cone boundary.")
    divergence_norm: PositiveFloat = Field(1e8, description="Objective magnitude considered as divergence.")
    warm_start: bool = Field(False, description="Start from the strictly feasible point found by phase 1.")


class RoundingOptions(OptionsBase):
    seed: conint(ge=0) = Field(0, description="Seed of every random hyperplane, never taken from the clock.")
    trials: PositiveInt = Field(2000, description="Amount of random hyperplanes drawn.")
    threads: PositiveInt = Field(1, description="Workers sharing the trials.")


class BnbOptions(OptionsBase):
    max_nodes: PositiveInt = Field(100000, description="Maximum amount of explored nodes.")
    node_iterations: PositiveInt = Field(200, description="Maximum iterations of each node relaxation.")
    integrality_tol: PositiveFloat = Field(1e-6, description="Distance to 0 or 1 considered integral.")


class Subcommand(EnumNameHyphenCase):
    PSD = "psd"
    CHOL = "chol"
    EIG = "eig"
    SOLVE = "solve"
    THETA = "theta"
    STABLE = "stable"
    COPOS = "copos"
    SOS = "sos"
    MAXCUT = "maxcut"
    QCR = "qcr"


class OutputFormat(EnumNameHyphenCase):
    JSON = "json"
    TEXT = "text"


class SchemeOption(EnumNameHyphenCase):
    NONE = "none"
    R1 = "r1"
    R2 = "r2"


class Command(OptionsBase):
    """
    Validated command line request.
    """

    subcommand: Subcommand
    input: str = Field(min_length=1, description="Problem file, or '-' for standard input.")
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON
    tol: PositiveFloat = 1e-7
    feas_tol: PositiveFloat = 1e-8
    max_iter: PositiveInt = 200
    seed: conint(ge=0) = 0
    trials: PositiveInt = 2000
    threads: PositiveInt = 1
    r: Optional[int] = Field(None, ge=0, description="Hierarchy level.")
    scheme: SchemeOption = SchemeOption.R2

    @root_validator(skip_on_failure=True)
    def check_required(cls, values):  # noqa: N805
        sub = values.get("subcommand")
        if sub in (Subcommand.COPOS, ) and values.get("r") is None:
            raise ValueError(f"Option [r] is required by subcommand [{sub}]")
        return values

    def solve_options(self) -> SolveOptions:
        return SolveOptions(tol=self.tol, feas_tol=self.feas_tol, max_iter=self.max_iter)

    def rounding_options(self) -> RoundingOptions:
        return RoundingOptions(seed=self.seed, trials=self.trials, threads=self.threads)
