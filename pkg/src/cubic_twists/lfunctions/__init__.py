"""L-function evaluation: providers, the Hurwitz oracle, the AFE and Hecke L-functions."""
from .afe import AFE_KERNEL, AfeConfig, SLocalData, L_afe, epsilon_factor, partial_LS, s_local_data
from .hecke import (
    C_OMEGA, HeckeCharacter, dedekind_zeta_Qomega, hecke_character, hecke_L, hecke_root_number,
    residue_c_omega, residue_of_partial_hecke,
)
from .hurwitz import dirichlet_L_oracle, hurwitz_zeta
from .lvalue import LValue
from .providers import (
    CACHE_ENV, CoefficientProvider, get_provider, provider_gl2_delta, provider_sym2_delta, provider_zeta,
    set_cache_dir, tau_exact,
)

__all__ = [
    "AFE_KERNEL", "AfeConfig", "SLocalData", "L_afe", "epsilon_factor", "partial_LS", "s_local_data",
    "C_OMEGA", "HeckeCharacter", "dedekind_zeta_Qomega", "hecke_character", "hecke_L", "hecke_root_number",
    "residue_c_omega", "residue_of_partial_hecke", "dirichlet_L_oracle", "hurwitz_zeta", "LValue",
    "CACHE_ENV", "CoefficientProvider", "get_provider", "provider_gl2_delta", "provider_sym2_delta",
    "provider_zeta", "set_cache_dir", "tau_exact",
]
