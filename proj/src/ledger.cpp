#include "powrace/ledger.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace powrace::ledger {
namespace {

void put_u64_be(std::uint8_t* out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        out[7 - i] = static_cast<std::uint8_t>(v >> (i * 8));
    }
}

Hash256 hash_pair(const Hash256& left, const Hash256& right) {
    std::array<std::uint8_t, 64> buf;
    std::memcpy(buf.data(), left.data(), 32);
    std::memcpy(buf.data() + 32, right.data(), 32);
    return sha256(buf);
}

} // namespace

std::array<std::uint8_t, 80> serialize_header(const BlockHeader& header) {
    std::array<std::uint8_t, 80> buf;
    std::memcpy(buf.data(), header.parent_hash.data(), 32);
    std::memcpy(buf.data() + 32, header.merkle_root.data(), 32);
    put_u64_be(buf.data() + 64, header.nonce);
    put_u64_be(buf.data() + 72, header.timestamp);
    return buf;
}

Hash256 header_hash(const BlockHeader& header) {
    return sha256(serialize_header(header));
}

Target max_target() {
    Target t;
    t.fill(0xff);
    return t;
}

Target pow2_target(unsigned bit) {
    if (bit >= 256) throw std::invalid_argument("target exponent out of range");
    Target t{};
    t[31 - bit / 8] = static_cast<std::uint8_t>(1u << (bit % 8));
    return t;
}

bool meets_target(const Hash256& hash, const Target& target) {
    return hash < target; // lexicographic on big-endian bytes == numeric
}

Hash256 merkle_root(std::span<const Transaction> transactions) {
    if (transactions.empty()) throw std::invalid_argument("no transactions");
    std::vector<Hash256> level;
    level.reserve(transactions.size());
    for (const Transaction& tx : transactions) {
        level.push_back(sha256(tx.payload));
    }
    while (level.size() > 1) {
        if (level.size() % 2 != 0) level.push_back(level.back());
        std::vector<Hash256> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            next.push_back(hash_pair(level[i], level[i + 1]));
        }
        level = std::move(next);
    }
    return level.front();
}

Block mine_block(const Hash256& parent_hash, std::vector<Transaction> transactions,
                 const Target& target, std::uint64_t timestamp,
                 std::uint64_t nonce_start) {
    Target zero{};
    if (target == zero) throw std::invalid_argument("target must be positive");
    if (transactions.empty()) throw std::invalid_argument("no transactions");

    Block block;
    block.header.parent_hash = parent_hash;
    block.header.merkle_root = merkle_root(transactions);
    block.header.timestamp = timestamp;
    block.transactions = std::move(transactions);

    std::uint64_t nonce = nonce_start;
    std::uint64_t tried = 0;
    do {
        block.header.nonce = nonce;
        if (meets_target(header_hash(block.header), target)) return block;
        ++nonce; // wraps mod 2^64
        ++tried;
    } while (tried != 0); // tried wraps to 0 after 2^64 candidates
    throw std::runtime_error("unminable at target");
}

std::string reject_reason_text(RejectReason reason) {
    switch (reason) {
        case RejectReason::kNone: return "accepted";
        case RejectReason::kPowTargetMissed: return "pow target missed";
        case RejectReason::kParentMismatch: return "parent mismatch";
        case RejectReason::kMerkleMismatch: return "merkle mismatch";
    }
    return "unknown";
}

Verdict verify_block(const Block& block, const Target& target, const Hash256& expected_parent) {
    if (!meets_target(header_hash(block.header), target)) {
        return {false, RejectReason::kPowTargetMissed};
    }
    if (block.header.parent_hash != expected_parent) {
        return {false, RejectReason::kParentMismatch};
    }
    if (block.transactions.empty() || block.header.merkle_root != merkle_root(block.transactions)) {
        return {false, RejectReason::kMerkleMismatch};
    }
    return {true, RejectReason::kNone};
}

Block genesis_block() {
    Block g;
    g.transactions.push_back(Transaction{});
    g.header.parent_hash = Hash256{};
    g.header.merkle_root = merkle_root(g.transactions);
    g.header.nonce = 0;
    g.header.timestamp = 0;
    return g;
}

Chain make_chain(Target target) {
    Chain chain;
    chain.target = target;
    chain.blocks.push_back(genesis_block());
    return chain;
}

Verdict append_block(Chain& chain, Block block) {
    if (chain.blocks.empty()) throw std::invalid_argument("chain has no genesis");
    Verdict v = verify_block(block, chain.target, header_hash(chain.blocks.back().header));
    if (v.accepted) chain.blocks.push_back(std::move(block));
    return v;
}

ChainValidation validate_chain(const Chain& chain) {
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& b = chain.blocks[i];
        if (i == 0) {
            // Genesis: zero parent and a consistent Merkle root; no target check.
            if (b.header.parent_hash != Hash256{}) {
                return {false, i, RejectReason::kParentMismatch};
            }
            if (b.transactions.empty() || b.header.merkle_root != merkle_root(b.transactions)) {
                return {false, i, RejectReason::kMerkleMismatch};
            }
            continue;
        }
        Verdict v = verify_block(b, chain.target, header_hash(chain.blocks[i - 1].header));
        if (!v.accepted) return {false, i, v.reason};
    }
    return {};
}

} // namespace powrace::ledger
