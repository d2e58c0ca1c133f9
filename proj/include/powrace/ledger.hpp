#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "powrace/sha256.hpp"

namespace powrace::ledger {

struct Transaction {
    Bytes payload;
};

struct BlockHeader {
    Hash256 parent_hash{};
    Hash256 merkle_root{};
    std::uint64_t nonce = 0;
    std::uint64_t timestamp = 0;
};

/// Fixed 80-byte encoding: parent_hash || merkle_root || nonce (BE) || timestamp (BE).
std::array<std::uint8_t, 80> serialize_header(const BlockHeader& header);
Hash256 header_hash(const BlockHeader& header);

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;
};

/// Mining target, a 256-bit big-endian integer. A block is valid when its
/// header hash, read as a big-endian integer, is strictly below the target.
using Target = Hash256;

Target max_target();              // 2^256 - 1
Target pow2_target(unsigned bit); // 2^bit, bit < 256
bool meets_target(const Hash256& hash, const Target& target);

/// Root of the binary hash tree over transaction payloads. Leaves are
/// sha256(payload); an interior node is sha256(left || right); at any level
/// with an odd count the last digest is duplicated before pairing. A single
/// transaction is its own root.
Hash256 merkle_root(std::span<const Transaction> transactions);

/// Search nonces starting at nonce_start (wrapping mod 2^64) until the header
/// hash meets the target. Deterministic for fixed inputs.
Block mine_block(const Hash256& parent_hash, std::vector<Transaction> transactions,
                 const Target& target, std::uint64_t timestamp,
                 std::uint64_t nonce_start = 0);

enum class RejectReason {
    kNone,
    kPowTargetMissed,
    kParentMismatch,
    kMerkleMismatch,
};

std::string reject_reason_text(RejectReason reason);

struct Verdict {
    bool accepted = false;
    RejectReason reason = RejectReason::kNone;

    explicit operator bool() const { return accepted; }
};

/// Checks, in order: header hash below target, parent linkage, Merkle root
/// consistency. The verdict carries the first failed check.
Verdict verify_block(const Block& block, const Target& target, const Hash256& expected_parent);

struct Chain {
    std::vector<Block> blocks;
    Target target{};
};

/// Genesis: all-zero parent hash, a single empty-payload transaction,
/// nonce 0, timestamp 0. Exempt from the target check.
Block genesis_block();
Chain make_chain(Target target);

/// Appends iff verify_block accepts against the chain tip; otherwise the
/// chain is left untouched and the rejection is returned.
Verdict append_block(Chain& chain, Block block);

struct ChainValidation {
    bool ok = true;
    std::size_t failed_index = 0;
    RejectReason reason = RejectReason::kNone;
};

/// Full-chain walk: linkage, Merkle roots and targets for every block
/// (genesis is exempt from the target check only).
ChainValidation validate_chain(const Chain& chain);

} // namespace powrace::ledger
