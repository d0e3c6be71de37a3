"""Request schemas for the service verbs.

Every verb takes one JSON body validated by a pydantic model with
``extra="forbid"``: unknown keys are a schema error, not a silent ignore.
Complex scalars travel as [re, im] pairs (bare reals accepted on input).
"""

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

ComplexPair = Union[float, int, List[float]]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class OutputOptions(StrictModel):
    out_dir: Optional[str] = None
    dump_fields: bool = False
    label: str = ""


class VerifyAppendix1Request(StrictModel):
    A: ComplexPair = Field(default=1.0)
    B: ComplexPair = Field(default=0.0)
    tol: float = Field(default=1e-6, gt=0)
    n_symmetry_samples: int = Field(default=100, ge=1, le=10_000)
    seed: int = 0
    output: OutputOptions = OutputOptions()


class CurveSpec(StrictModel):
    genus: int = Field(ge=2)
    f_coeffs: List[ComplexPair]


class DivisorPoint(StrictModel):
    x: Optional[ComplexPair] = None
    sheet: Literal[1, -1] = 1
    mult: int = Field(default=1, ge=1)
    at_infinity: bool = False


class CurveBasisRequest(StrictModel):
    curve: CurveSpec
    seed: int = 0
    output: OutputOptions = OutputOptions()


class QDimRequest(StrictModel):
    curve: CurveSpec
    divisor: List[DivisorPoint]
    expected_dim: Optional[int] = None
    seed: int = 0
    output: OutputOptions = OutputOptions()


class KodairaRequest(StrictModel):
    curve: CurveSpec
    points: List[DivisorPoint]
    seed: int = 0
    output: OutputOptions = OutputOptions()


class WeierstrassRequest(StrictModel):
    curve: CurveSpec
    points: Optional[List[DivisorPoint]] = None
    seed: int = 0
    output: OutputOptions = OutputOptions()


class SecantTestRequest(StrictModel):
    curve: CurveSpec
    covector: List[ComplexPair]
    nu: Literal[1, 2] = 2
    member_tol: float = Field(default=1e-8, gt=0)
    seed: int = 0
    output: OutputOptions = OutputOptions()


class DecomposeRequest(StrictModel):
    curve: CurveSpec
    divisor: List[DivisorPoint]
    alpha: List[ComplexPair]
    seed: int = 0
    output: OutputOptions = OutputOptions()


class LiouvilleWeightSpec(StrictModel):
    zeros: List[ComplexPair] = []
    mults: List[int] = []
    h_const: float = Field(default=1.0, gt=0)


class LiouvilleSolveRequest(StrictModel):
    delta: float = Field(default=0.5, gt=0)
    n: int = Field(default=257, ge=33)
    profile: Literal["bubble", "collapse"] = "bubble"
    lam: float = Field(default=1.0, gt=0)
    t: float = Field(default=0.5, gt=0)
    A: ComplexPair = 1.0
    B: ComplexPair = 0.0
    weight: Optional[LiouvilleWeightSpec] = None
    tol: float = Field(default=1e-10, gt=0)
    seed: int = 0
    output: OutputOptions = OutputOptions()


class LiouvilleFamilyRequest(StrictModel):
    schedule: List[float]
    delta: float = Field(default=0.5, gt=0)
    n: int = Field(default=257, ge=33)
    profile: Literal["bubble", "collapse"] = "bubble"
    A: ComplexPair = 1.0
    B: ComplexPair = 0.0
    tol: float = Field(default=1e-10, gt=0)
    seed: int = 0
    output: OutputOptions = OutputOptions()


class LiouvilleMassRequest(StrictModel):
    solve: LiouvilleSolveRequest = LiouvilleSolveRequest()
    center: ComplexPair = 0.0
    r_max: Optional[float] = Field(default=None, gt=0)
    levels: int = Field(default=6, ge=2)
    flat_tol: float = Field(default=0.05, gt=0)
    seed: int = 0
    output: OutputOptions = OutputOptions()


class LiouvilleRescaleRequest(StrictModel):
    solve: LiouvilleSolveRequest = LiouvilleSolveRequest()
    tau: float = Field(gt=0)
    n_exponent: int = Field(default=2, ge=0)
    target_delta: Optional[float] = Field(default=None, gt=0)
    seed: int = 0
    output: OutputOptions = OutputOptions()


class DonaldsonOptions(StrictModel):
    n: int = Field(default=201, ge=31)
    beta_seed: List[ComplexPair] = [1.0]
    beta_scale: ComplexPair = 1.0
    tol: float = Field(default=1e-8, gt=0)
    tol_hol: Optional[float] = Field(default=None, gt=0)


class DonaldsonMinimizeRequest(StrictModel):
    t: float = Field(default=1.0, gt=0)
    options: DonaldsonOptions = DonaldsonOptions()
    seed: int = 0
    output: OutputOptions = OutputOptions()


class DonaldsonSweepRequest(StrictModel):
    schedule: Optional[List[float]] = None
    options: DonaldsonOptions = DonaldsonOptions()
    seed: int = 0
    output: OutputOptions = OutputOptions()


class DonaldsonInvolutionRequest(StrictModel):
    t: float = Field(default=1.0, gt=0)
    options: DonaldsonOptions = DonaldsonOptions()
    seed: int = 0
    output: OutputOptions = OutputOptions()


class DonaldsonPairingRequest(StrictModel):
    beta_seed: List[ComplexPair] = [1.0]
    alpha_seed: List[ComplexPair] = [1.0]
    eta_coeffs: Optional[List[ComplexPair]] = None
    gauss_order: int = Field(default=32, ge=4, le=96)
    seed: int = 0
    output: OutputOptions = OutputOptions()


REQUEST_MODELS = {
    "verify-appendix1": VerifyAppendix1Request,
    "curve.basis": CurveBasisRequest,
    "curve.q-dim": QDimRequest,
    "curve.kodaira": KodairaRequest,
    "curve.weierstrass": WeierstrassRequest,
    "curve.secant-test": SecantTestRequest,
    "curve.decompose": DecomposeRequest,
    "liouville.solve": LiouvilleSolveRequest,
    "liouville.family": LiouvilleFamilyRequest,
    "liouville.mass": LiouvilleMassRequest,
    "liouville.rescale": LiouvilleRescaleRequest,
    "donaldson.minimize": DonaldsonMinimizeRequest,
    "donaldson.sweep-t": DonaldsonSweepRequest,
    "donaldson.involution-check": DonaldsonInvolutionRequest,
    "donaldson.pairing": DonaldsonPairingRequest,
}
