#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "geogap/topic.hpp"

using namespace geogap;

namespace {

IngestedTopics parse(const std::string& text, const std::vector<std::string>& ids) {
    std::istringstream in(text);
    return read_topics(in, ids);
}

Matrix planted(std::uint64_t seed, std::size_t per, std::vector<int>& truth) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.1);
    Matrix m;
    const std::vector<std::vector<double>> centres{{1, 0.2, 0}, {-1, 0.1, 0.1}};
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per; ++i) {
            auto v = centres[static_cast<std::size_t>(c)];
            for (auto& x : v) x += g(rng);
            m.append_row(normalize(v));
            truth.push_back(c);
        }
    return m;
}

} // namespace

TEST(IngestTopics, AcceptsValidRows) {
    auto t = parse("{\"K_s\":3,\"labels\":[\"a\",\"b\",\"c\"]}\n"
                   "{\"id\":\"r1\",\"pi\":[0.5,0.5,0]}\n"
                   "{\"id\":\"r2\",\"pi\":[1,0,0]}\n",
                   {"r1", "r2"});
    EXPECT_EQ(t.model.num_topics, 3u);
    EXPECT_TRUE(t.model.ingested());
    EXPECT_EQ(t.model.labels[1], "b");
    EXPECT_DOUBLE_EQ(t.distribution.of("r1")[1], 0.5);
}

TEST(IngestTopics, ToleranceRule) {
    auto t = parse("{\"K_s\":2}\n{\"id\":\"r\",\"pi\":[0.6,0.4005]}\n", {"r"});
    auto row = t.distribution.of("r");
    EXPECT_NEAR(row[0] + row[1], 1.0, 1e-12);
    EXPECT_NEAR(row[0], 0.6 / 1.0005, 1e-12);
    EXPECT_THROW(parse("{\"K_s\":2}\n{\"id\":\"r\",\"pi\":[0.5,0.4]}\n", {"r"}), Error);
}

TEST(IngestTopics, ErrorsNameTheId) {
    auto msg = [](const std::string& text, const std::vector<std::string>& ids) {
        try {
            parse(text, ids);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(msg("{\"K_s\":2}\n{\"id\":\"neg\",\"pi\":[1.5,-0.5]}\n", {}).find("neg"), std::string::npos);
    EXPECT_NE(msg("{\"K_s\":2}\n{\"id\":\"a\",\"pi\":[1,0]}\n", {"a", "lost"}).find("lost"), std::string::npos);
    EXPECT_NE(msg("{\"K_s\":2}\n{\"id\":\"w\",\"pi\":[1,0,0]}\n", {}).find("w"), std::string::npos);
    EXPECT_THROW(parse("{\"id\":\"a\",\"pi\":[1]}\n", {}), Error);
    EXPECT_THROW(parse("", {}), Error);
}

TEST(IngestTopics, WriteReadRoundTrip) {
    TopicModel m;
    m.num_topics = 2;
    m.labels = {"x", "y"};
    TopicDistribution d(2);
    d.add("a", std::vector<double>{0.25, 0.75});
    d.add("b", std::vector<double>{1.0, 0.0});
    std::stringstream buf;
    write_topics(buf, m, d);
    auto back = read_topics(buf, {"a", "b"});
    EXPECT_EQ(back.model.labels, m.labels);
    EXPECT_EQ(back.distribution.matrix(), d.matrix());
}

TEST(FallbackTopics, SingleTopicIsNormalisedMean) {
    std::vector<int> truth;
    auto pts = planted(1, 5, truth);
    auto m = fit_fallback_topics(pts, 1, 7, 0.1);
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < pts.rows(); ++i)
        for (int q = 0; q < 3; ++q) mean[q] += pts(i, q);
    auto u = normalize(mean);
    for (int q = 0; q < 3; ++q) EXPECT_NEAR((*m.centroids)(0, q), u[q], 1e-12);
}

TEST(FallbackTopics, RecoversPlantedPartition) {
    std::vector<int> truth;
    auto pts = planted(2, 25, truth);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto m = fit_fallback_topics(pts, 2, seed, 0.05);
        auto pi = soft_topics(pts, m);
        std::size_t first = pi(0, 0) > pi(0, 1) ? 0 : 1;
        for (std::size_t i = 0; i < pts.rows(); ++i) {
            std::size_t arg = pi(i, 0) > pi(i, 1) ? 0 : 1;
            EXPECT_EQ(arg == first, truth[i] == truth[0]) << "seed " << seed << " point " << i;
        }
    }
}

TEST(FallbackTopics, OneTopicPerPoint) {
    std::vector<int> truth;
    auto pts = planted(3, 3, truth);
    auto m = fit_fallback_topics(pts, pts.rows(), 1, 0.1);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        double best = 2;
        for (std::size_t s = 0; s < m.num_topics; ++s)
            best = std::min(best, cosine_distance(pts.row(i), m.centroids->row(s)));
        EXPECT_NEAR(best, 0.0, 1e-12);
    }
}

TEST(FallbackTopics, DeterministicAndValidated) {
    std::vector<int> truth;
    auto pts = planted(4, 20, truth);
    auto a = fit_fallback_topics(pts, 4, 99, 0.1);
    auto b = fit_fallback_topics(pts, 4, 99, 0.1);
    EXPECT_EQ(*a.centroids, *b.centroids);
    EXPECT_THROW(fit_fallback_topics(pts, pts.rows() + 1, 0, 0.1), Error);
}

TEST(SoftTopics, SimplexPositivityAndTotalMass) {
    std::vector<int> truth;
    auto pts = planted(5, 20, truth);
    auto m = fit_fallback_topics(pts, 3, 1, 0.5);
    auto pi = soft_topics(pts, m);
    double total = 0;
    for (std::size_t i = 0; i < pi.rows(); ++i) {
        double s = 0;
        for (double v : pi.row(i)) {
            EXPECT_GT(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
        total += s;
    }
    EXPECT_NEAR(total, static_cast<double>(pts.rows()), 1e-9);
}

TEST(SoftTopics, TwoTopicScalarOracle) {
    TopicModel m;
    m.num_topics = 2;
    m.temperature = 0.1;
    m.centroids = Matrix();
    m.centroids->append_row(std::vector<double>{1, 0});
    m.centroids->append_row(std::vector<double>{0, 1});
    auto x = normalize(std::vector<double>{2, 1});
    double d0 = 1 - x[0], d1 = 1 - x[1];
    double p0 = 1.0 / (1.0 + std::exp(-(d1 - d0) / 0.1));
    auto p = topic_membership(x, m);
    EXPECT_NEAR(p[0], p0, 1e-12);
    auto eq = topic_membership(normalize(std::vector<double>{1, 1}), m);
    EXPECT_NEAR(eq[0], 0.5, 1e-12);
    TopicModel ingested;
    ingested.num_topics = 2;
    EXPECT_THROW(topic_membership(x, ingested), Error);
}

TEST(IngestTopics, ExporterWrittenFileLoads) {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("req-0" + std::to_string(i));
    auto t = ingest_topics(GEOGAP_SOURCE_DIR "/tests/data/exporter_topics.jsonl", ids);
    EXPECT_EQ(t.model.num_topics, 3u);
    EXPECT_EQ(t.model.labels[2], "network");
    EXPECT_NEAR(t.distribution.of("req-04")[1], 0.6, 1e-12);
}
