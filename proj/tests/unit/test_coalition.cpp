#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "coalopt/coalition.hpp"
#include "coalopt/errors.hpp"

using namespace coalopt;

namespace {

// ============================================================================
// Oracle: Bell numbers via the binomial recurrence
//   B(n+1) = sum_k C(n,k) B(k),
// computed independently of the production Bell-triangle code.
// ============================================================================
std::uint64_t bell_oracle(int n) {
    std::vector<std::vector<std::uint64_t>> choose(n + 1, std::vector<std::uint64_t>(n + 1, 0));
    for (int i = 0; i <= n; ++i) {
        choose[i][0] = 1;
        for (int j = 1; j <= i; ++j)
            choose[i][j] = choose[i - 1][j - 1] + (j <= i - 1 ? choose[i - 1][j] : 0);
    }
    std::vector<std::uint64_t> bell(n + 1, 0);
    bell[0] = 1;
    for (int m = 1; m <= n; ++m) {
        std::uint64_t sum = 0;
        for (int k = 0; k < m; ++k) sum += choose[m - 1][k] * bell[k];
        bell[m] = sum;
    }
    return bell[n];
}

bool is_partition(const CoalitionStructure& s) {
    std::vector<int> seen(s.agent_count(), 0);
    for (const auto& c : s.coalitions()) {
        if (c.members.empty()) return false;
        for (int m : c.members) {
            if (m < 0 || m >= s.agent_count()) return false;
            if (seen[m]++) return false;
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
}

}  // namespace

TEST_SUITE("coalition") {

TEST_CASE("bell numbers match the binomial-recurrence oracle") {
    for (int n = 0; n <= 20; ++n) CHECK(bell_number(n) == bell_oracle(n));
    CHECK(bell_number(3) == 5);
    CHECK(bell_number(4) == 15);
    CHECK(bell_number(5) == 52);
    CHECK(bell_number(10) == 115975);
    CHECK(bell_number(12) == 4213597);
    CHECK_THROWS_AS(bell_number(-1), ValidationError);
    CHECK_THROWS_AS(bell_number(26), ValidationError);
}

TEST_CASE("enumeration count equals the Bell number") {
    for (int n = 1; n <= 8; ++n) {
        auto structures = enumerate_structures(AgentSet::numbered(n));
        CHECK(structures.size() == bell_oracle(n));
    }
}

TEST_CASE("three agents yield the five known structures in canonical order") {
    auto agents = AgentSet::numbered(3);
    auto structures = enumerate_structures(agents);
    REQUIRE(structures.size() == 5);
    CHECK(structures[0].to_text(agents) == "{W1,W2,W3}");
    CHECK(structures[1].to_text(agents) == "{W1,W2}|{W3}");
    CHECK(structures[2].to_text(agents) == "{W1,W3}|{W2}");
    CHECK(structures[3].to_text(agents) == "{W1}|{W2,W3}");
    CHECK(structures[4].to_text(agents) == "{W1}|{W2}|{W3}");
    CHECK(structures[0].canonical_key() == "000");
    CHECK(structures[1].canonical_key() == "001");
    CHECK(structures[2].canonical_key() == "010");
    CHECK(structures[3].canonical_key() == "011");
    CHECK(structures[4].canonical_key() == "012");
    CHECK(structures[0].is_grand());
    CHECK(!structures[1].is_grand());
    CHECK(structures[4].is_singletons());
}

TEST_CASE("single agent has exactly the grand structure") {
    auto structures = enumerate_structures(AgentSet::numbered(1));
    REQUIRE(structures.size() == 1);
    CHECK(structures[0].is_grand());
    CHECK(structures[0].is_singletons());
}

TEST_CASE("every enumerated structure is a partition") {
    for (int n = 1; n <= 6; ++n)
        for (const auto& s : enumerate_structures(AgentSet::numbered(n)))
            CHECK(is_partition(s));
}

TEST_CASE("enumeration is deterministic and lexicographically ordered") {
    auto agents = AgentSet::numbered(5);
    auto a = enumerate_structures(agents);
    auto b = enumerate_structures(agents);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    for (std::size_t i = 1; i < a.size(); ++i)
        CHECK(a[i - 1].canonical_key() < a[i].canonical_key());
}

TEST_CASE("ten agents enumerate to the documented count") {
    auto structures = enumerate_structures(AgentSet::numbered(10));
    CHECK(structures.size() == 115975);
}

TEST_CASE("enumeration beyond the cap is refused with guidance") {
    try {
        enumerate_structures(AgentSet::numbered(13));
        FAIL("expected CapacityError");
    } catch (const CapacityError& e) {
        std::string msg = e.what();
        CHECK(msg.find("12") != std::string::npos);
        CHECK(msg.find("27644437") != std::string::npos);
    }
    // A raised cap admits more agents.
    CHECK(enumerate_structures(AgentSet::numbered(4), 4).size() == 15);
    CHECK_THROWS_AS(enumerate_structures(AgentSet::numbered(5), 4), CapacityError);
}

TEST_CASE("coalition counts") {
    CHECK(count_coalitions(1) == 1);
    CHECK(count_coalitions(3) == 7);
    CHECK(count_coalitions(10) == 1023);
    CHECK_THROWS_AS(count_coalitions(0), ValidationError);
    CHECK_THROWS_AS(count_coalitions(64), ValidationError);
}

TEST_CASE("structure text and key round-trip through the parser") {
    auto agents = AgentSet::numbered(4);
    for (const auto& s : enumerate_structures(agents)) {
        CHECK(parse_structure(s.to_text(agents), agents) == s);
        CHECK(parse_structure(s.canonical_key(), agents) == s);
    }
}

TEST_CASE("parser rejects malformed input") {
    auto agents = AgentSet::numbered(3);
    CHECK_THROWS_AS(parse_structure("", agents), ValidationError);
    CHECK_THROWS_AS(parse_structure("102", agents), ValidationError);   // must start at 0
    CHECK_THROWS_AS(parse_structure("021", agents), ValidationError);   // jumps growth
    CHECK_THROWS_AS(parse_structure("01", agents), ValidationError);    // wrong length
    CHECK_THROWS_AS(parse_structure("{W1,W2}", agents), ValidationError);          // misses W3
    CHECK_THROWS_AS(parse_structure("{W1,W9}|{W2,W3}", agents), ValidationError);  // unknown label
    CHECK_THROWS_AS(parse_structure("{W1,W1}|{W2,W3}", agents), ValidationError);  // duplicate
    CHECK_THROWS_AS(parse_structure("W1|W2|W3", agents), ValidationError);         // no braces
}

TEST_CASE("agent set validation") {
    CHECK_THROWS_AS(AgentSet(std::vector<std::string>{}), ValidationError);
    CHECK_THROWS_AS(AgentSet({"A", "A"}), ValidationError);
    CHECK_THROWS_AS(AgentSet({"A,B"}), ValidationError);
    CHECK_THROWS_AS(AgentSet({""}), ValidationError);
    auto agents = AgentSet({"north", "south"});
    CHECK(agents.index_of("south") == 1);
    CHECK_THROWS_AS(agents.index_of("east"), ValidationError);
}

TEST_CASE("deny filter drops structures containing a listed coalition") {
    auto agents = AgentSet::numbered(3);
    auto all = enumerate_structures(agents);
    StructureFilter filter;
    filter.deny.push_back(Coalition{{0, 1}});  // {W1,W2}
    std::vector<CoalitionStructure> kept;
    for (const auto& s : all)
        if (filter.admits(s)) kept.push_back(s);
    REQUIRE(kept.size() == 4);
    for (const auto& s : kept) CHECK(s.to_text(agents) != "{W1,W2}|{W3}");
}

TEST_CASE("allow filter restricts multi-member coalitions") {
    auto agents = AgentSet::numbered(3);
    auto all = enumerate_structures(agents);
    StructureFilter filter;
    filter.allow.push_back(Coalition{{0, 1}});  // only {W1,W2} may form
    std::vector<std::string> kept;
    for (const auto& s : all)
        if (filter.admits(s)) kept.push_back(s.to_text(agents));
    // Grand coalition and {W1,W3},{W2,W3} pairings are filtered out.
    CHECK(kept == std::vector<std::string>{"{W1,W2}|{W3}", "{W1}|{W2}|{W3}"});
}

TEST_CASE("empty filter admits everything") {
    StructureFilter filter;
    CHECK(filter.empty());
    for (const auto& s : enumerate_structures(AgentSet::numbered(4)))
        CHECK(filter.admits(s));
}

TEST_CASE("coalition_of locates every agent") {
    auto agents = AgentSet::numbered(4);
    auto s = parse_structure("{W1,W4}|{W2}|{W3}", agents);
    CHECK(s.coalition_of(0) == 0);
    CHECK(s.coalition_of(3) == 0);
    CHECK(s.coalition_of(1) == 1);
    CHECK(s.coalition_of(2) == 2);
    CHECK(s.coalition_count() == 3);
}

}  // TEST_SUITE
