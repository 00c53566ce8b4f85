#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "dash/error.hpp"
#include "dash/ledger/blockchain.hpp"
#include "dash/ledger/validation.hpp"
#include "temp_dir.hpp"

using namespace dash;
using namespace dash::ledger;
namespace fs = std::filesystem;

namespace {

using dash::testing::TempDir;

ChainConfig smallConfig(std::uint32_t difficulty = 4) {
  ChainConfig c;
  c.difficulty = difficulty;
  return c;
}

struct Fixture {
  runtime::ContractTypeRegistry types;
  std::unique_ptr<Blockchain> chain;
  Address alice, bob;

  explicit Fixture(ChainConfig config = smallConfig(), std::optional<fs::path> dir = std::nullopt) {
    chain = std::make_unique<Blockchain>(config, types, std::make_shared<SteppingClock>(1'000, 1), dir);
    chain->initGenesis();
    alice = chain->createEOA("alice");
    bob = chain->createEOA("bob");
  }

  // One transfer per block.
  void grow(std::size_t blocks) {
    for (std::size_t i = 0; i < blocks; ++i) {
      chain->submit(alice, Transfer{bob, 1 + i});
      chain->mineBlock();
    }
  }
};

}  // namespace

TEST(Transaction, IdIsDigestOfBody) {
  auto tx = Transaction::make(runtime::eoaAddress("alice"), 0, Transfer{runtime::eoaAddress("bob"), 5}, 1000, 42);
  EXPECT_EQ(tx.id, hashCanonical(tx.body()));
  EXPECT_TRUE(tx.idMatches());
  auto back = Transaction::fromJson(canonicalParse(canonicalDump(tx.toJson())));
  EXPECT_EQ(back, tx);
  back.gasLimit = 1001;
  EXPECT_FALSE(back.idMatches());
}

TEST(Transaction, RejectsExtraFields) {
  auto tx = Transaction::make(runtime::eoaAddress("alice"), 0, Transfer{runtime::eoaAddress("bob"), 5}, 1000, 42);
  Json j = tx.toJson();
  j["extra"] = 1;
  try {
    Transaction::fromJson(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedTransaction);
  }
}

TEST(Block, StoredHashMustMatch) {
  Fixture f;
  f.grow(1);
  Json j = f.chain->block(1).toJson();
  EXPECT_EQ(Block::fromJson(j), f.chain->block(1));
  j["timestamp"] = j["timestamp"].get<std::uint64_t>() + 1;
  EXPECT_THROW(Block::fromJson(j), Error);
}

TEST(Pow, DifficultyZeroTakesOneAttempt) {
  BlockHeader h;
  h.difficulty = 0;
  EXPECT_EQ(solvePow(h), 1u);
  EXPECT_EQ(h.powNonce, 0u);
}

TEST(Pow, SolvedHeaderMeetsDifficulty) {
  BlockHeader h;
  h.height = 3;
  h.difficulty = 10;
  auto attempts = solvePow(h);
  EXPECT_EQ(attempts, h.powNonce + 1);
  EXPECT_GE(leadingZeroBits(h.hash()), 10);
  EXPECT_TRUE(h.meetsDifficulty());
}

TEST(Chain, GenesisShape) {
  Fixture f;
  ASSERT_EQ(f.chain->length(), 1u);
  const auto g = f.chain->block(0);
  EXPECT_EQ(g.header.height, 0u);
  EXPECT_TRUE(g.header.prevHash.isZero());
  EXPECT_TRUE(g.transactions.empty());
  EXPECT_TRUE(f.chain->validate().valid);
}

TEST(Chain, MinesInSubmissionOrder) {
  Fixture f;
  auto t1 = f.chain->submit(f.alice, Transfer{f.bob, 1});
  auto t2 = f.chain->submit(f.bob, Transfer{f.alice, 2});
  auto t3 = f.chain->submit(f.alice, Transfer{f.bob, 3});
  auto block = f.chain->mineBlock();
  ASSERT_EQ(block.transactions.size(), 3u);
  EXPECT_EQ(block.transactions[0].id, t1);
  EXPECT_EQ(block.transactions[1].id, t2);
  EXPECT_EQ(block.transactions[2].id, t3);
  EXPECT_EQ(f.chain->receipt(t3).indexInBlock, 2u);
  EXPECT_EQ(block.header.txRoot, computeTxRoot(block.transactions));
}

TEST(Chain, EmptyMempool) {
  Fixture f;
  try {
    f.chain->mineBlock();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyMempool);
  }
}

TEST(Chain, MaxTxsCapsBlock) {
  Fixture f;
  for (int i = 0; i < 5; ++i) f.chain->submit(f.alice, Transfer{f.bob, 1});
  EXPECT_EQ(f.chain->mineBlock(2).transactions.size(), 2u);
  EXPECT_EQ(f.chain->mempool().size(), 3u);
}

TEST(Chain, SubmitRejectsBadNonceAndUnknownSender) {
  Fixture f;
  auto tx = Transaction::make(f.alice, 7, Transfer{f.bob, 1}, 1000, 1);
  try {
    f.chain->submit(tx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonceMismatch);
  }
  auto ghost = Transaction::make(runtime::eoaAddress("ghost"), 0, Transfer{f.bob, 1}, 1000, 1);
  try {
    f.chain->submit(ghost);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSender);
  }
  auto forged = Transaction::make(f.alice, 0, Transfer{f.bob, 1}, 1000, 1);
  forged.gasLimit = 2000;
  try {
    f.chain->submit(forged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedTransaction);
  }
}

TEST(Chain, TimestampsNeverDecrease) {
  runtime::ContractTypeRegistry types;
  // A clock stuck in the past relative to the genesis timestamp.
  struct BackwardsClock : Clock {
    std::uint64_t t = 5000;
    std::uint64_t now() override { return t -= 10; }
  };
  Blockchain chain(smallConfig(), types, std::make_shared<BackwardsClock>());
  chain.initGenesis();
  auto a = chain.createEOA("a");
  for (int i = 0; i < 5; ++i) {
    chain.submit(a, Transfer{a, 1});
    chain.mineBlock();
  }
  for (std::uint64_t h = 1; h < chain.length(); ++h)
    EXPECT_GE(chain.block(h).header.timestamp, chain.block(h - 1).header.timestamp);
  EXPECT_TRUE(chain.validate().valid);
}

TEST(Validation, UntamperedChainIsValid) {
  Fixture f;
  f.grow(10);
  auto blocks = f.chain->blocks();
  EXPECT_TRUE(validateBlocks(blocks, 4).valid);
}

TEST(Validation, TransactionByteFlipFailsTxRoot) {
  Fixture f;
  f.grow(6);
  auto blocks = f.chain->blocks();
  std::get<Transfer>(blocks[3].transactions[0].payload).amount ^= 1;
  auto report = validateBlocks(blocks, 4);
  ASSERT_FALSE(report.valid);
  EXPECT_EQ(report.firstFailure->height, 3u);
  EXPECT_EQ(report.firstFailure->rule, "txRoot");
}

TEST(Validation, ReplacedPrevHashFailsLinkage) {
  Fixture f;
  f.grow(10);
  auto blocks = f.chain->blocks();
  blocks[7].header.prevHash = sha256("not the parent");
  auto report = validateBlocks(blocks, 4);
  ASSERT_FALSE(report.valid);
  EXPECT_EQ(report.firstFailure->height, 7u);
  EXPECT_EQ(report.firstFailure->rule, "linkage");
}

TEST(Validation, EditedHeaderBreaksChildLinkage) {
  Fixture f;
  f.grow(5);
  auto blocks = f.chain->blocks();
  blocks[2].header.timestamp += 1;
  auto report = validateBlocks(blocks, 4);
  ASSERT_FALSE(report.valid);
  // Either the edited header misses the target or its child no longer links.
  EXPECT_LE(report.firstFailure->height, 3u);
}

TEST(Validation, RejectsWrongDifficulty) {
  Fixture f;
  f.grow(3);
  auto blocks = f.chain->blocks();
  blocks.back().header.difficulty = 3;
  solvePow(blocks.back().header);
  auto report = validateBlocks(blocks, 4);
  ASSERT_FALSE(report.valid);
  EXPECT_EQ(report.firstFailure->rule, "difficulty");
}

TEST(Validation, RejectsNonceGap) {
  Fixture f;
  f.grow(3);
  auto blocks = f.chain->blocks();
  auto& tx = blocks.back().transactions[0];
  tx.senderNonce += 1;
  tx.id = tx.computeId();
  blocks.back().header.txRoot = computeTxRoot(blocks.back().transactions);
  solvePow(blocks.back().header);
  auto report = validateBlocks(blocks, 4);
  ASSERT_FALSE(report.valid);
  EXPECT_EQ(report.firstFailure->rule, "nonce");
}

TEST(Validation, RejectsDecreasingTimestamp) {
  Fixture f;
  f.grow(3);
  auto blocks = f.chain->blocks();
  blocks[3].header.timestamp = blocks[2].header.timestamp - 1;
  solvePow(blocks[3].header);
  auto report = validateBlocks(blocks, 4);
  ASSERT_FALSE(report.valid);
  EXPECT_EQ(report.firstFailure->height, 3u);
  EXPECT_EQ(report.firstFailure->rule, "timestamp");
}

TEST(Persistence, ReopenReplaysToSameState) {
  TempDir dir;
  Digest root;
  std::size_t receipts = 0;
  runtime::ContractTypeRegistry types;
  {
    Fixture f(smallConfig(), dir.path);
    f.grow(5);
    f.chain->submit(f.alice, Transfer{f.bob, 99});  // left pending
    root = f.chain->withState([](const runtime::WorldState& s) { return s.stateRoot(); });
    receipts = f.chain->receiptCount();
  }
  auto reopened = Blockchain::open(dir.path, types, std::make_shared<SteppingClock>(5'000, 1));
  EXPECT_EQ(reopened->length(), 6u);
  EXPECT_EQ(reopened->receiptCount(), receipts);
  EXPECT_EQ(reopened->withState([](const runtime::WorldState& s) { return s.stateRoot(); }), root);
  EXPECT_EQ(reopened->mempool().size(), 1u);
  EXPECT_TRUE(reopened->validate().valid);
  EXPECT_TRUE(Blockchain::validateDirectory(dir.path).valid);
}

TEST(Persistence, TamperedFileIsDetected) {
  TempDir dir;
  {
    Fixture f(smallConfig(), dir.path);
    f.grow(4);
  }
  auto file = dir.path / "chain.jsonl";
  std::string text;
  {
    std::ifstream in(file, std::ios::binary);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto pos = text.find("\"amount\":3");
  ASSERT_NE(pos, std::string::npos);
  text[pos + 9] = '4';
  {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << text;
  }
  auto report = Blockchain::validateDirectory(dir.path);
  ASSERT_FALSE(report.valid);
  EXPECT_EQ(report.firstFailure->height, 3u);
  runtime::ContractTypeRegistry types;
  EXPECT_THROW(Blockchain::open(dir.path, types, std::make_shared<SystemClock>()), Error);
}

TEST(Persistence, InitTwiceIsRefused) {
  TempDir dir;
  { Fixture f(smallConfig(), dir.path); }
  runtime::ContractTypeRegistry types;
  Blockchain again(smallConfig(), types, std::make_shared<SystemClock>(), dir.path);
  EXPECT_THROW(again.initGenesis(), Error);
}

TEST(Hooks, RunOncePerCommittedBlockInOrder) {
  Fixture f;
  std::vector<std::uint64_t> seen;
  f.chain->onCommit([&](const Block& b, const std::vector<Receipt>& r) {
    seen.push_back(b.header.height);
    EXPECT_EQ(r.size(), b.transactions.size());
  });
  f.grow(4);
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{1, 2, 3, 4}));
}

TEST(Mempool, PendingNoncesChain) {
  Fixture f;
  auto t1 = f.chain->prepare(f.alice, Transfer{f.bob, 1});
  f.chain->submit(t1);
  auto t2 = f.chain->prepare(f.alice, Transfer{f.bob, 1});
  EXPECT_EQ(t2.senderNonce, t1.senderNonce + 1);
  f.chain->submit(t2);
  EXPECT_EQ(f.chain->mempool().pendingFor(f.alice), 2u);
  f.chain->mineBlock();
  EXPECT_EQ(f.chain->account(f.alice)->nonce, 2u);
}
