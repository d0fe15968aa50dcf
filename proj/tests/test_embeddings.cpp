#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "frameforge/embeddings.hpp"
#include "frameforge/error.hpp"
#include "support.hpp"

using namespace frameforge;

namespace {

void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(v >> 8));
}
void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}
void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}
void put_f32(std::string& s, float f) { put_u32(s, std::bit_cast<std::uint32_t>(f)); }

EmbeddingSet from_bytes(const std::string& bytes) {
    std::istringstream in(bytes);
    return read_embeddings(in);
}

std::string to_bytes(const EmbeddingSet& set) {
    std::ostringstream out;
    write_embeddings(set, out);
    return out.str();
}

EmbeddingSet random_set(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
    std::normal_distribution<float> normal(0.0f, 3.0f);
    EmbeddingSet s;
    s.dim = dim;
    s.layer_spec = "layers=9-12";
    std::vector<float> w(n * dim), m(n * dim);
    for (auto& x : w) x = normal(gen);
    for (auto& x : m) x = normal(gen);
    for (std::size_t i = 0; i < n; ++i) {
        s.ids.push_back("id" + std::to_string(i));
    }
    s.word_vectors = MatrixF(n, dim, std::move(w));
    s.mask_vectors = MatrixF(n, dim, std::move(m));
    return s;
}

// Two rows, dim 4, layer spec "L12", written field by field.
std::string handmade(const std::string& second_id = "s22") {
    std::string b = "FFE1";
    put_u32(b, 1);
    put_u32(b, 4);
    put_u64(b, 2);
    put_u32(b, 3);
    b += "L12";
    put_u16(b, 2);
    b += "s1";
    put_u16(b, static_cast<std::uint16_t>(second_id.size()));
    b += second_id;
    for (float f : {1.0f, -2.0f, 0.5f, 3.25f, 0.0f, 1e-3f, -7.0f, 8.0f}) put_f32(b, f);
    for (float f : {9.0f, 10.0f, -11.5f, 12.0f, 0.25f, -0.125f, 2.0f, 4.0f}) put_f32(b, f);
    return b;
}

} // namespace

TEST(ReadEmbeddings, HandmadeFile) {
    const auto s = from_bytes(handmade());
    EXPECT_EQ(s.dim, 4u);
    EXPECT_EQ(s.layer_spec, "L12");
    EXPECT_EQ(s.ids, (std::vector<std::string>{"s1", "s22"}));
    const auto word = s.word_vectors.values();
    EXPECT_EQ(std::vector<float>(word.begin(), word.end()),
              (std::vector<float>{1.0f, -2.0f, 0.5f, 3.25f, 0.0f, 1e-3f, -7.0f, 8.0f}));
    EXPECT_EQ(s.mask_vectors(1, 1), -0.125f);
    EXPECT_EQ(to_bytes(s), handmade());
}

TEST(ReadEmbeddings, RejectsMalformedFiles) {
    std::string bad_magic = handmade();
    bad_magic[3] = '2';
    EXPECT_THROW(from_bytes(bad_magic), FormatError);

    std::string bad_version = handmade();
    bad_version[4] = 2;
    EXPECT_THROW(from_bytes(bad_version), FormatError);

    std::string zero_dim = handmade();
    zero_dim[8] = 0;
    EXPECT_THROW(from_bytes(zero_dim), FormatError);

    const std::string full = handmade();
    for (std::size_t cut : {std::size_t{3}, std::size_t{20}, std::size_t{30}, full.size() - 1}) {
        EXPECT_THROW(from_bytes(full.substr(0, cut)), FormatError) << "cut at " << cut;
    }
    EXPECT_THROW(from_bytes(full + "x"), FormatError);

    std::string nan = full;
    const float qnan = std::nanf("");
    std::memcpy(nan.data() + nan.size() - 4, &qnan, 4);
    EXPECT_THROW(from_bytes(nan), FormatError);

    EXPECT_THROW(from_bytes(handmade("s1")), FormatError);
}

TEST(ReadEmbeddings, MissingFileIsIoError) {
    EXPECT_THROW(read_embeddings("/nonexistent/x.ffe1"), IoError);
}

TEST(WriteEmbeddings, RoundTripAndCanonicalBytes) {
    std::mt19937_64 gen(5);
    const auto s = random_set(gen, 17, 9);
    const std::string bytes = to_bytes(s);
    EXPECT_EQ(from_bytes(bytes), s);
    EXPECT_EQ(to_bytes(s), bytes);
    EXPECT_EQ(bytes.size(), encoded_size(s));

    testing_support::TempDir dir("ffe1");
    write_embeddings(s, dir / "a.ffe1");
    write_embeddings(s, dir / "b.ffe1");
    EXPECT_EQ(testing_support::read_file(dir / "a.ffe1"), testing_support::read_file(dir / "b.ffe1"));
    EXPECT_EQ(read_embeddings(dir / "a.ffe1"), s);
}

TEST(WriteEmbeddings, EmptySetIsHeaderOnly) {
    EmbeddingSet s;
    s.dim = 5;
    s.layer_spec = "x";
    s.word_vectors = MatrixF(0, 5);
    s.mask_vectors = MatrixF(0, 5);
    const auto bytes = to_bytes(s);
    EXPECT_EQ(bytes.size(), 4u + 4 + 4 + 8 + 4 + 1);
    EXPECT_EQ(from_bytes(bytes), s);
}

TEST(WriteEmbeddings, OneRowSizeFromLayout) {
    EmbeddingSet s;
    s.dim = 3;
    s.ids = {"a"};
    s.word_vectors = MatrixF(1, 3, std::vector<float>{1, 2, 3});
    s.mask_vectors = MatrixF(1, 3, std::vector<float>{4, 5, 6});
    // magic 4 + version 4 + dim 4 + count 8 + spec length 4, id 2 + 1, payload 2*3*4.
    EXPECT_EQ(to_bytes(s).size(), 24u + 3 + 24);
}

TEST(MixWeight, RejectsOutOfRange) {
    EXPECT_THROW(MixWeight(-0.01), InvalidArgument);
    EXPECT_THROW(MixWeight(1.01), InvalidArgument);
    EXPECT_THROW(MixWeight(std::nan("")), InvalidArgument);
    EXPECT_NO_THROW(MixWeight(0.0));
    EXPECT_NO_THROW(MixWeight(1.0));
}

TEST(MixEmbeddings, Midpoint) {
    EmbeddingSet s;
    s.dim = 2;
    s.ids = {"a"};
    s.word_vectors = MatrixF(1, 2, std::vector<float>{2, 0});
    s.mask_vectors = MatrixF(1, 2, std::vector<float>{0, 2});
    const auto m = mix_embeddings(s, MixWeight(0.5));
    EXPECT_EQ(m(0, 0), 1.0);
    EXPECT_EQ(m(0, 1), 1.0);
}

TEST(MixEmbeddings, EndpointsAreExactAndLinearInBetween) {
    std::mt19937_64 gen(9);
    const auto s = random_set(gen, 23, 13);
    const auto w = mix_embeddings(s, MixWeight(0.0));
    const auto m = mix_embeddings(s, MixWeight(1.0));
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t k = 0; k < s.dim; ++k) {
            EXPECT_EQ(w(i, k), static_cast<double>(s.word_vectors(i, k)));
            EXPECT_EQ(m(i, k), static_cast<double>(s.mask_vectors(i, k)));
        }
    }
    for (double alpha : {0.1, 0.3, 0.5, 0.77, 0.9}) {
        const auto x = mix_embeddings(s, MixWeight(alpha));
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::size_t k = 0; k < s.dim; ++k) {
                const double expect = w(i, k) + alpha * (m(i, k) - w(i, k));
                const double scale = std::abs(w(i, k)) + std::abs(m(i, k));
                EXPECT_NEAR(x(i, k), expect, 4 * std::numeric_limits<double>::epsilon() * scale);
                EXPECT_TRUE(std::isfinite(x(i, k)));
            }
        }
    }
}

TEST(EmbeddingIndex, LooksUpRows) {
    std::mt19937_64 gen(1);
    const auto s = random_set(gen, 4, 2);
    EmbeddingIndex index(s);
    EXPECT_EQ(index.row_of("id3"), 3u);
    EXPECT_TRUE(index.contains("id0"));
    EXPECT_FALSE(index.contains("zz"));
    EXPECT_THROW(index.row_of("zz"), InvalidArgument);
}
