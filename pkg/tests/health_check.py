#!/usr/bin/env python3
"""
InfoRel Health Check
Quick verification that all core features are working
"""

import os
import sys
import warnings

# Suppress warnings
warnings.filterwarnings("ignore")

# Add project root to path (go up one level from tests folder)
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def health_check():
    """Quick health check of InfoRel features"""
    print("🏥 InfoRel Health Check")
    print("=" * 30)

    checks = []

    # Check Services
    try:
        from src.services.chain_service import ChainService
        from src.services.data_service import DataService
        from src.services.diagnostics_service import iat_ess
        from src.services.inference_service import InferenceService

        print("✅ Services: All loaded")
        checks.append(True)
    except Exception as e:
        print(f"❌ Services: Error - {str(e)}")
        checks.append(False)

    # Check Command Line
    try:
        from src.cli import main
        from src.cli.commands import COMMANDS

        print(f"✅ Commands: {', '.join(sorted(COMMANDS))}")
        checks.append(True)
    except Exception as e:
        print(f"❌ Commands: Error - {str(e)}")
        checks.append(False)

    # Check a short chain on a planted network
    try:
        from src.models.network_models import LinkKind
        from src.models.sampler_models import ModelKind, RunConfig
        from src.services.chain_service import run_chain
        from src.services.simulation_service import plant_communities

        data, _ = plant_communities(12, 2, 0.8, LinkKind.BINARY, seed=0)
        result = run_chain(ModelKind.IMMM, data, None, RunConfig(iterations=5, burn_in=1, init_k=2))
        print(f"✅ Sampler: {len(result.samples)} samples retained")
        checks.append(True)
    except Exception as e:
        print(f"❌ Sampler: Error - {str(e)}")
        checks.append(False)

    # Check diagnostics
    try:
        import numpy as np
        from src.services.diagnostics_service import iat_ess

        report = iat_ess(np.random.default_rng(0).standard_normal(200))
        print(f"✅ Diagnostics: tau_hat {report.tau_hat:.2f}")
        checks.append(True)
    except Exception as e:
        print(f"❌ Diagnostics: Error - {str(e)}")
        checks.append(False)

    # Summary
    passed = sum(checks)
    total = len(checks)

    print("\n" + "=" * 30)
    print(f"Health Score: {passed}/{total}")

    if passed == total:
        print("🎉 All systems healthy!")
        return True
    elif passed >= total - 1:
        print("✅ Mostly healthy (minor issues)")
        return True
    else:
        print("⚠️  Health issues detected")
        return False


if __name__ == "__main__":
    healthy = health_check()
    sys.exit(0 if healthy else 1)
