#include <algorithm>

#include "chainorder/chain.hpp"
#include "chainorder/verify.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chainorder;
using testutil::ev;
using testutil::id;
using testutil::pay;

namespace {

// Frozen reference digests, computed once with an independent implementation
// of the canonical encoding.
const char* kPayloadP0 = "169b5b823c62b64ca7e5f8456a13c8d5d06f4ece522a58bc2b8a784dcf3609b0";
const char* kGenesisA = "8aa40940383f72a9faa304749b24215833b2f631f09ebd970bb062eebeb66fb4";
const char* kBlockA1 = "e7a2a0dfb184d06f3f943d4b3670e5c00187871fd97e96fceddffedae836c975";
const char* kGenesisBWithRef = "dd6f4cc1f633fdd2ea0078013760f34d02e8ce5ac6de7f7c75e2772c0f89260f";

bool has_violation(const std::vector<Violation>& vs, ViolationKind kind) {
    return std::any_of(vs.begin(), vs.end(),
                       [&](const Violation& v) { return v.kind == kind; });
}

bool has_violation(const std::vector<Violation>& vs, ViolationKind kind,
                   std::uint64_t height) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
        return v.kind == kind && v.height == height;
    });
}

NetworkSnapshot two_chain_snapshot() {
    NetworkSnapshot snap;
    snap.chains.emplace(id("A"), Chain{id("A"), {}, {}});
    snap.chains.emplace(id("B"), Chain{id("B"), {}, {}});
    append_block(snap, id("A"), pay("p0"), {});
    append_block(snap, id("A"), pay("p1"), {});
    append_block(snap, id("B"), pay("pb0"),
                 {AssociationRef{id("A"), snap.chains.at(id("A")).blocks[1].summary_hash}});
    return snap;
}

} // namespace

TEST_CASE("digest hex round trip") {
    Digest d = sha256("p0");
    CHECK(d.to_hex() == kPayloadP0);
    CHECK(Digest::from_hex(d.to_hex()) == d);
    CHECK(!Digest::from_hex(""));
    CHECK(!Digest::from_hex(std::string(63, 'a')));
    CHECK(!Digest::from_hex(std::string(64, 'G')));
    std::string upper(64, 'A');
    CHECK(!Digest::from_hex(upper));
    CHECK(Digest::zero().is_zero());
    CHECK(!d.is_zero());
}

TEST_CASE("canonical encoding matches frozen golden digests") {
    std::vector<AssociationRef> none;
    auto genesis_encoding =
        canonical_block_encoding(id("A"), 0, Digest::zero(), sha256("p0"), none);
    CHECK(genesis_encoding.size() == 81);

    Digest genesis = hash_block(id("A"), 0, Digest::zero(), sha256("p0"), none);
    CHECK(genesis.to_hex() == kGenesisA);

    Digest a1 = hash_block(id("A"), 1, genesis, sha256("p1"), none);
    CHECK(a1.to_hex() == kBlockA1);

    std::vector<AssociationRef> refs{AssociationRef{id("A"), a1}};
    Digest b0 = hash_block(id("B"), 0, Digest::zero(), sha256("pb0"), refs);
    CHECK(b0.to_hex() == kGenesisBWithRef);
}

TEST_CASE("reference order does not matter to the encoding") {
    AssociationRef r1{id("A"), sha256("x")};
    AssociationRef r2{id("C"), sha256("y")};
    std::vector<AssociationRef> sorted{r1, r2};
    std::vector<AssociationRef> reversed{r2, r1};
    CHECK(hash_block(id("B"), 0, Digest::zero(), pay("p"), sorted) ==
          hash_block(id("B"), 0, Digest::zero(), pay("p"), reversed));
}

TEST_CASE("hash_block rejects invalid reference sets") {
    AssociationRef r{id("A"), sha256("x")};
    std::vector<AssociationRef> dup{r, r};
    CHECK_THROWS_AS((void)hash_block(id("B"), 0, Digest::zero(), pay("p"), dup),
                    DuplicateAssociationError);
    std::vector<AssociationRef> self{AssociationRef{id("B"), sha256("x")}};
    CHECK_THROWS_AS((void)hash_block(id("B"), 0, Digest::zero(), pay("p"), self),
                    SelfAssociationError);
}

TEST_CASE("flipping a payload byte changes the digest") {
    Digest payload = pay("p0");
    Digest base = hash_block(id("A"), 0, Digest::zero(), payload, {});
    for (std::size_t i = 0; i < Digest::size(); ++i) {
        Digest tampered = payload;
        tampered.bytes[i] ^= 0x01;
        CHECK(hash_block(id("A"), 0, Digest::zero(), tampered, {}) != base);
    }
}

TEST_CASE("append_block links blocks and keeps timestamps out of the hash") {
    Chain chain{id("A"), {}, {}};
    const Block& g = append_block(chain, pay("p0"), {}, 100);
    CHECK(g.height == 0);
    CHECK(g.prev_hash.is_zero());
    CHECK(g.summary_hash.to_hex() == kGenesisA);
    CHECK(g.local_timestamp == 100);

    const Block& b1 = append_block(chain, pay("p1"), {}, 200);
    CHECK(b1.height == 1);
    CHECK(b1.prev_hash == chain.blocks[0].summary_hash);
    CHECK(b1.summary_hash.to_hex() == kBlockA1);

    Chain other{id("A"), {}, {}};
    append_block(other, pay("p0"), {}, 999);
    CHECK(other.blocks[0].summary_hash == chain.blocks[0].summary_hash);

    Chain untimed{id("A"), {}, {}};
    append_block(untimed, pay("p0"), {});
    CHECK(untimed.blocks[0].summary_hash == chain.blocks[0].summary_hash);
    CHECK(!untimed.blocks[0].local_timestamp);
}

TEST_CASE("send_association carries the sender's tip and validates endpoints") {
    NetworkSnapshot snap;
    snap.chains.emplace(id("A"), Chain{id("A"), {}, {}});
    snap.chains.emplace(id("B"), Chain{id("B"), {}, {}});

    CHECK_THROWS_AS(send_association(snap, id("A"), id("A"), 0), SelfAssociationError);
    CHECK_THROWS_AS(send_association(snap, id("A"), id("Z"), 0), UnknownChainError);
    CHECK_THROWS_AS(send_association(snap, id("Z"), id("A"), 0), UnknownChainError);
    CHECK_THROWS_AS(send_association(snap, id("A"), id("B"), 0), EmptyChainError);

    append_block(snap, id("A"), pay("p0"), {});
    const PendingAssociation& p = send_association(snap, id("A"), id("B"), 3);
    CHECK(p.from_chain == id("A"));
    CHECK(p.to_chain == id("B"));
    CHECK(p.sent_at == 3);
    CHECK(p.from_block_hash == snap.chains.at(id("A")).blocks[0].summary_hash);
    CHECK(snap.pending.size() == 1);

    append_block(snap, id("A"), pay("p1"), {});
    const PendingAssociation& p2 = send_association(snap, id("A"), id("B"), 4);
    CHECK(p2.from_block_hash == snap.chains.at(id("A")).blocks[1].summary_hash);
}

TEST_CASE("accept_pending packages only strictly earlier sends") {
    NetworkSnapshot snap;
    snap.chains.emplace(id("A"), Chain{id("A"), {}, {}});
    snap.chains.emplace(id("B"), Chain{id("B"), {}, {}});
    append_block(snap, id("A"), pay("p0"), {});
    send_association(snap, id("A"), id("B"), 5);

    const Block& same_tick = accept_pending(snap, id("B"), pay("b0"), 5, 5);
    CHECK(same_tick.accepted.empty());
    CHECK(snap.pending.size() == 1);

    const Block& later = accept_pending(snap, id("B"), pay("b1"), 6, 6);
    REQUIRE(later.accepted.size() == 1);
    CHECK(later.accepted[0].from_chain == id("A"));
    CHECK(snap.pending.empty());

    const Block& idle = accept_pending(snap, id("B"), pay("b2"));
    CHECK(idle.accepted.empty());
    CHECK(idle.height == 2);
}

TEST_CASE("accept_pending dedupes and sorts canonically") {
    NetworkSnapshot snap;
    for (const char* c : {"A", "B", "C"}) {
        snap.chains.emplace(id(c), Chain{id(c), {}, {}});
    }
    append_block(snap, id("A"), pay("a0"), {});
    append_block(snap, id("C"), pay("c0"), {});
    send_association(snap, id("C"), id("B"), 0);
    send_association(snap, id("A"), id("B"), 0);
    send_association(snap, id("A"), id("B"), 1);  // same tip again

    const Block& b = accept_pending(snap, id("B"), pay("b0"), 2, 2);
    REQUIRE(b.accepted.size() == 2);
    CHECK(b.accepted[0].from_chain == id("A"));
    CHECK(b.accepted[1].from_chain == id("C"));
    CHECK(std::is_sorted(b.accepted.begin(), b.accepted.end()));
    CHECK(snap.pending.empty());
}

TEST_CASE("accept_pending on an unknown chain throws") {
    NetworkSnapshot snap;
    CHECK_THROWS_AS((void)accept_pending(snap, id("Z"), pay("p")), UnknownChainError);
}

TEST_CASE("drop_pending removes only the recipient's entries") {
    NetworkSnapshot snap;
    for (const char* c : {"A", "B", "C"}) {
        snap.chains.emplace(id(c), Chain{id(c), {}, {}});
    }
    append_block(snap, id("A"), pay("a0"), {});
    send_association(snap, id("A"), id("B"), 0);
    send_association(snap, id("A"), id("B"), 1);
    send_association(snap, id("A"), id("C"), 2);

    CHECK(drop_pending(snap, id("B")) == 2);
    CHECK(snap.pending.size() == 1);
    CHECK(snap.pending[0].to_chain == id("C"));
    CHECK(drop_pending(snap, id("B")) == 0);
}

TEST_CASE("append_block with unresolvable reference throws") {
    NetworkSnapshot snap = two_chain_snapshot();
    CHECK_THROWS_AS(append_block(snap, id("B"), pay("x"),
                                 {AssociationRef{id("A"), sha256("absent")}}),
                    UnknownReferenceError);
    CHECK_THROWS_AS(append_block(snap, id("B"), pay("x"),
                                 {AssociationRef{id("Z"), sha256("absent")}}),
                    UnknownChainError);
}

TEST_CASE("forget_payload keeps hashes and verification intact") {
    NetworkSnapshot snap = two_chain_snapshot();
    Chain& a = snap.chains.at(id("A"));
    Digest before = a.blocks[0].summary_hash;

    forget_payload(a, 0);
    CHECK(a.forgotten.contains(0));
    CHECK(a.blocks[0].summary_hash == before);
    forget_payload(a, 0);
    CHECK(a.forgotten.size() == 1);
    CHECK_THROWS_AS(forget_payload(a, 7), UnknownBlockError);

    CHECK(verify_chain(a).empty());
    CHECK(verify_snapshot(snap).empty());
}

TEST_CASE("find_block resolves shared hashes") {
    NetworkSnapshot snap = two_chain_snapshot();
    const Chain& a = snap.chains.at(id("A"));
    CHECK(find_block(snap, id("A"), a.blocks[1].summary_hash) == &a.blocks[1]);
    CHECK(find_block(snap, id("A"), sha256("absent")) == nullptr);
    CHECK(find_block(snap, id("Z"), a.blocks[1].summary_hash) == nullptr);
}

TEST_CASE("valid_chain_id rejects control characters and spaces") {
    CHECK(valid_chain_id("A"));
    CHECK(valid_chain_id("node-7.example"));
    CHECK(!valid_chain_id(""));
    CHECK(!valid_chain_id("two words"));
    CHECK(!valid_chain_id("tab\there"));
    CHECK(!valid_chain_id(std::string(1, '\x01')));
    CHECK(!valid_chain_id(std::string(1, '\x7f')));
}

TEST_CASE("verify_chain pinpoints tampering and its downstream effect") {
    Chain chain{id("A"), {}, {}};
    for (int i = 0; i < 4; ++i) append_block(chain, pay("p" + std::to_string(i)), {});
    CHECK(verify_chain(chain).empty());

    chain.blocks[2].payload_hash = pay("evil");
    auto violations = verify_chain(chain);
    CHECK(has_violation(violations, ViolationKind::SummaryMismatch, 2));
    CHECK(has_violation(violations, ViolationKind::PrevHashMismatch, 3));
}

TEST_CASE("verify_chain catches structural damage") {
    Chain chain{id("A"), {}, {}};
    append_block(chain, pay("p0"), {});
    append_block(chain, pay("p1"), {});

    SUBCASE("height gap") {
        chain.blocks[1].height = 5;
        CHECK(has_violation(verify_chain(chain), ViolationKind::HeightMismatch));
    }
    SUBCASE("nonzero genesis prev") {
        chain.blocks[0].prev_hash = sha256("junk");
        CHECK(has_violation(verify_chain(chain), ViolationKind::GenesisPrevHash));
    }
    SUBCASE("foreign block") {
        chain.blocks[1].chain = id("B");
        CHECK(has_violation(verify_chain(chain), ViolationKind::ChainMismatch));
    }
    SUBCASE("duplicate refs smuggled into an existing block") {
        AssociationRef r{id("B"), sha256("x")};
        chain.blocks[1].accepted = {r, r};
        auto violations = verify_chain(chain);
        CHECK(has_violation(violations, ViolationKind::DuplicateReference));
    }
    SUBCASE("self reference smuggled into an existing block") {
        chain.blocks[1].accepted = {AssociationRef{id("A"), sha256("x")}};
        CHECK(has_violation(verify_chain(chain), ViolationKind::SelfReference));
    }
}

TEST_CASE("verify_snapshot resolves references and pending entries") {
    NetworkSnapshot snap = two_chain_snapshot();
    CHECK(verify_snapshot(snap).empty());

    SUBCASE("dangling block reference") {
        Chain& b = snap.chains.at(id("B"));
        append_block(b, pay("x"), {AssociationRef{id("A"), sha256("absent")}});
        CHECK(has_violation(verify_snapshot(snap), ViolationKind::UnresolvedReference));
    }
    SUBCASE("pending to unknown recipient") {
        snap.pending.push_back(PendingAssociation{
            id("A"), snap.chains.at(id("A")).blocks[0].summary_hash, id("Z"), 0});
        CHECK(has_violation(verify_snapshot(snap), ViolationKind::DanglingPending));
    }
    SUBCASE("pending with unresolvable hash") {
        snap.pending.push_back(
            PendingAssociation{id("A"), sha256("absent"), id("B"), 0});
        CHECK(has_violation(verify_snapshot(snap), ViolationKind::DanglingPending));
    }
    SUBCASE("honest pending is fine") {
        send_association(snap, id("A"), id("B"), 9);
        CHECK(verify_snapshot(snap).empty());
    }
}

TEST_CASE("forged mutual references surface as a cycle") {
    // Two blocks claiming made-up summaries that point at each other. Only
    // forged hashes can produce this shape; verification must still see it.
    Digest claim_a = sha256("claimed-summary-a");
    Digest claim_b = sha256("claimed-summary-b");

    Block a0;
    a0.chain = id("A");
    a0.payload_hash = pay("a");
    a0.accepted = {AssociationRef{id("B"), claim_b}};
    a0.summary_hash = claim_a;

    Block b0;
    b0.chain = id("B");
    b0.payload_hash = pay("b");
    b0.accepted = {AssociationRef{id("A"), claim_a}};
    b0.summary_hash = claim_b;

    NetworkSnapshot snap;
    snap.chains.emplace(id("A"), Chain{id("A"), {a0}, {}});
    snap.chains.emplace(id("B"), Chain{id("B"), {b0}, {}});

    auto violations = verify_snapshot(snap);
    CHECK(has_violation(violations, ViolationKind::CyclicReferences));
    CHECK(has_violation(violations, ViolationKind::SummaryMismatch));
}

TEST_CASE("every single-byte digest flip is caught") {
    NetworkSnapshot honest = two_chain_snapshot();
    send_association(honest, id("B"), id("A"), 7);
    REQUIRE(verify_snapshot(honest).empty());

    std::size_t field_count = testutil::digest_fields(honest).size();
    for (std::size_t f = 0; f < field_count; ++f) {
        for (std::size_t byte = 0; byte < Digest::size(); ++byte) {
            NetworkSnapshot tampered = honest;
            testutil::digest_fields(tampered)[f]->bytes[byte] ^= 0x40;
            CHECK(!verify_snapshot(tampered).empty());
        }
    }
}
