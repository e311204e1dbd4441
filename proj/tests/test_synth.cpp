#include "polarface/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "polarface/image.hpp"

using namespace polarface;

TEST(SynthFace, DeterministicForFixedSeed) {
    const FaceParams params = face_params_for_subject(5, 2);
    const GrayImage a = synth_face(5, params, 10.0, 1.1, 0.02);
    const GrayImage b = synth_face(5, params, 10.0, 1.1, 0.02);
    EXPECT_EQ(a, b);
}

TEST(SynthFace, FullTurnMatchesBasePattern) {
    const FaceParams params = face_params_for_subject(5, 0);
    const GrayImage base = synth_face(5, params, 0.0, 1.0, 0.0);
    const GrayImage turned = synth_face(5, params, 360.0, 1.0, 0.0);
    EXPECT_LE(mean_abs_diff(base, turned), 0.02);
}

TEST(SynthFace, NoiseChangesPixelsWithinBound) {
    const FaceParams params = face_params_for_subject(5, 1);
    const GrayImage clean = synth_face(5, params, 0.0, 1.0, 0.0);
    const GrayImage noisy = synth_face(5, params, 0.0, 1.0, 0.05);
    EXPECT_NE(clean, noisy);
    EXPECT_LE(mean_abs_diff(clean, noisy), 3.0 * 0.05);
}

TEST(SynthFace, OutputStaysInUnitRange) {
    const FaceParams params = face_params_for_subject(8, 4);
    for (double sigma : {0.0, 0.05, 0.5}) {
        const GrayImage img = synth_face(8, params, 33.0, 1.2, sigma);
        for (double p : img.pixels) {
            ASSERT_GE(p, 0.0);
            ASSERT_LE(p, 1.0);
        }
    }
}

TEST(SynthFace, RejectsBadArguments) {
    const FaceParams params = face_params_for_subject(1, 0);
    EXPECT_THROW(synth_face(1, params, 0.0, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(synth_face(1, params, 0.0, 1.0, -0.1), std::invalid_argument);
}

TEST(SubjectTemplates, DistinctSubjectsRenderDistinctFaces) {
    for (std::size_t a = 0; a < 8; ++a) {
        const GrayImage fa = synth_face(3, face_params_for_subject(3, a));
        for (std::size_t b = a + 1; b < 8; ++b) {
            const GrayImage fb = synth_face(3, face_params_for_subject(3, b));
            EXPECT_GT(mean_abs_diff(fa, fb), 0.01) << a << " vs " << b;
        }
    }
}

TEST(Corpus, WriterIsDeterministicAndCountsFiles) {
    namespace fs = std::filesystem;
    CorpusOptions opt;
    opt.subjects = 3;
    opt.images_per_subject = 2;
    opt.height = opt.width = 21;
    opt.seed = 11;
    const fs::path dir_a = fs::temp_directory_path() / "pf_corpus_a";
    const fs::path dir_b = fs::temp_directory_path() / "pf_corpus_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    EXPECT_EQ(write_synthetic_corpus(dir_a, opt), 6u);
    EXPECT_EQ(write_synthetic_corpus(dir_b, opt), 6u);
    for (std::size_t s = 0; s < opt.subjects; ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "s%02zu", s);
        for (std::size_t i = 0; i < opt.images_per_subject; ++i) {
            char file[32];
            std::snprintf(file, sizeof(file), "i%03zu.pgm", i);
            EXPECT_EQ(load_pgm(dir_a / name / file), load_pgm(dir_b / name / file));
        }
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}
