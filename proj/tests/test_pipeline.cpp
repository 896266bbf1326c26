#include "blogrank/error.hpp"
#include "blogrank/pipeline.hpp"
#include "blogrank/synthetic.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace blogrank;
namespace fs = std::filesystem;

namespace {

std::string generated(const SyntheticParams& p) {
    std::ostringstream out;
    generate_synthetic(p, out);
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class PipelineTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("blogrank_pipeline_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        SyntheticParams p;
        p.weblogs = 60;
        p.posts = 600;
        generate_synthetic(p, (dir_ / "posts.jsonl").string());
        std::ofstream(dir_ / "manifest.json") << R"({"input": "posts.jsonl"})";
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string manifest() const { return (dir_ / "manifest.json").string(); }

    fs::path dir_;
};

std::size_t ran(const std::vector<StageOutcome>& outcomes) {
    return std::count_if(outcomes.begin(), outcomes.end(), [](const StageOutcome& o) { return o.ran; });
}

}  // namespace

TEST(Synthetic, SameSeedSameBytes) {
    SyntheticParams p;
    p.posts = 500;
    EXPECT_EQ(generated(p), generated(p));
    SyntheticParams q = p;
    q.seed = 2;
    EXPECT_NE(generated(p), generated(q));
}

TEST(Synthetic, ZeroDensitiesGiveIsolatedPosts) {
    SyntheticParams p;
    p.posts = 400;
    p.links_per_post = p.tags_per_post = p.news_per_post = 0;
    std::istringstream in(generated(p));
    const auto loaded = parse_corpus(in);
    EXPECT_EQ(loaded.corpus.size(), 400u);
    for (const auto& post : loaded.corpus.posts()) {
        EXPECT_TRUE(post.post_links.empty());
        EXPECT_TRUE(post.tags.empty());
        EXPECT_TRUE(post.news_links.empty());
    }
}

TEST(Synthetic, LinkDensityNearTarget) {
    SyntheticParams p;
    p.posts = 10000;
    p.weblogs = 500;
    std::istringstream in(generated(p));
    const auto loaded = parse_corpus(in);
    EXPECT_EQ(loaded.report.malformed, 0u);
    std::size_t links = 0;
    for (const auto& post : loaded.corpus.posts()) links += post.post_links.size();
    const double per_post = static_cast<double>(links) / loaded.corpus.size();
    EXPECT_GT(per_post, 0.27 * 0.5);
    EXPECT_LT(per_post, 0.27 * 1.5);
}

TEST_F(PipelineTest, BuildsThenSkips) {
    const auto first = run_pipeline(manifest());
    ASSERT_EQ(first.size(), 6u);
    EXPECT_EQ(ran(first), 6u);
    for (const char* f : {"corpus.snapshot.jsonl", "graph.tsv", "graph.tsv.nodes", "ranks.pagerank.tsv", "ranks.xrank.tsv",
                          "ranks.blogrank.tsv", "index.json"})
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    const std::string ranks = slurp(dir_ / "ranks.blogrank.tsv");

    const auto second = run_pipeline(manifest());
    EXPECT_EQ(ran(second), 0u);

    // Deleting one output rebuilds just that stage.
    fs::remove(dir_ / "ranks.xrank.tsv");
    const auto third = run_pipeline(manifest());
    EXPECT_EQ(ran(third), 1u);
    EXPECT_EQ(third[3].stage, "rank-xrank");
    EXPECT_TRUE(third[3].ran);

    // Ranking is deterministic down to the bytes.
    fs::remove(dir_ / "ranks.blogrank.tsv");
    run_pipeline(manifest());
    EXPECT_EQ(slurp(dir_ / "ranks.blogrank.tsv"), ranks);
}

TEST_F(PipelineTest, ConfigChangeInvalidatesDownstream) {
    run_pipeline(manifest());
    auto m = PipelineManifest::load(manifest());
    m.blogrank_config.tag_weight = 5;
    m.save(manifest());
    const auto out = run_pipeline(manifest());
    ASSERT_EQ(out.size(), 6u);
    EXPECT_FALSE(out[0].ran);
    EXPECT_FALSE(out[1].ran);
    EXPECT_FALSE(out[2].ran);
    EXPECT_FALSE(out[3].ran);
    EXPECT_TRUE(out[4].ran);
    EXPECT_FALSE(out[5].ran);
}

TEST_F(PipelineTest, CorruptGraphFailsRankStage) {
    run_pipeline(manifest());
    std::ofstream(dir_ / "graph.tsv", std::ios::app) << "x.com\ty.com\tnot-a-number\t0\t0\t0\n";
    try {
        run_pipeline(manifest());
        FAIL() << "expected a stage failure";
    } catch (const PipelineError& e) {
        EXPECT_EQ(e.stage(), "rank-pagerank");
        EXPECT_NE(std::string(e.what()).find("graph.tsv:"), std::string::npos) << e.what();
    }
}

TEST_F(PipelineTest, MissingInputFailsIngest) {
    std::ofstream(dir_ / "manifest.json") << R"({"input": "absent.jsonl"})";
    try {
        run_pipeline(manifest());
        FAIL() << "expected a stage failure";
    } catch (const PipelineError& e) {
        EXPECT_EQ(e.stage(), "ingest");
    }
}

TEST(HashFile, DistinguishesContent) {
    const auto dir = fs::temp_directory_path();
    std::ofstream(dir / "blogrank_hash_a") << "abc";
    std::ofstream(dir / "blogrank_hash_b") << "abd";
    EXPECT_NE(hash_file((dir / "blogrank_hash_a").string()), hash_file((dir / "blogrank_hash_b").string()));
    EXPECT_EQ(hash_file((dir / "blogrank_hash_a").string()), hash_file((dir / "blogrank_hash_a").string()));
    EXPECT_THROW(hash_file((dir / "blogrank_hash_missing").string()), IoError);
    fs::remove(dir / "blogrank_hash_a");
    fs::remove(dir / "blogrank_hash_b");
}
