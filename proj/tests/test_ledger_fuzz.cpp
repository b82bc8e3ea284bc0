#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ledger_fuzz.hpp"

// Reduced iteration counts; the acceptance suite runs the full budgets.

TEST_CASE("random transaction sequences never break phase safety") {
    const auto stats = ledger_fuzz::run_phase_safety_fuzz(5000, 0xFADED);
    CHECK(stats.phase_safety_violations == 0);
    CHECK(stats.phase_regressions == 0);
    CHECK(stats.conservation_failures == 0);
    CHECK(stats.slashing_failures == 0);
    CHECK(stats.payout_sign_failures == 0);
    CHECK(stats.settled_runs > 1000);  // the driver reaches settlement often
}

TEST_CASE("tampered reveals are never accepted") {
    CHECK(ledger_fuzz::run_tamper_fuzz(2000, 0xBEEF) == 0);
}
