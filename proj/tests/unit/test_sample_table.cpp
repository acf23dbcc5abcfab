#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace pwsaf;

namespace {

std::vector<AdmittanceSample> some_samples() {
  return extract_piecewise(*testbed::oscillator(10e-12), SamplingGrid::uniform(2.4, 4.0, 17)).samples();
}

}  // namespace

TEST(SampleTable, RoundTripIsBitExact) {
  const auto samples = some_samples();
  std::stringstream ss;
  write_sample_table(ss, samples);
  const auto back = read_sample_table(ss);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_TRUE(back[i] == samples[i]) << i;
}

TEST(SampleTable, HeaderHasSeventeenColumns) {
  std::stringstream ss;
  write_sample_table(ss, some_samples());
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 16);
  EXPECT_EQ(header.rfind("eta_c,v_o,f_o_hz,", 0), 0u);
}

TEST(SampleTable, ThirteenColumnFormAccepted) {
  std::istringstream in(
      "eta_c, v_o, f_o_hz, y_v_re, y_v_im, y_omega_re, y_omega_im, y_eta_re, y_eta_im, "
      "i_g1_re, i_g1_im, i_gm1_re, i_gm1_im\n"
      "1.5, 0.6, 5.0E9, 9e-3, 0, 0, 1e-12, 0, -2e-3, 1, 0, 0, 0\r\n"
      "\n"
      "1.6, +0.61, 5.01e9, 9e-3, 0, 0, 1e-12, 0, -2e-3, 1, 0, 0, 0\n");
  const auto s = read_sample_table(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].v_o, 0.61);
  EXPECT_EQ(s[0].f_o_hz, 5.0e9);
}

TEST(SampleTable, StoredComponentsRecombineByChainRule) {
  // (I_Gr, I_Gi) = (0.8, 1.1j): I_G1 = 0.95, I_G-1 = -0.15.
  std::istringstream in(
      "eta_c,v_o,f_o_hz,y_v_re,y_v_im,y_omega_re,y_omega_im,y_eta_re,y_eta_im,i_g1_re,i_g1_im,"
      "i_gm1_re,i_gm1_im,i_gr_re,i_gr_im,i_gi_re,i_gi_im\n"
      "1,0.6,5e9,1e-2,0,0,1e-12,0,-1e-3,0.95,0,-0.15,0,0.8,0,0,1.1\n");
  const auto s = read_sample_table(in);
  EXPECT_NEAR(s[0].injection().i_gr().real(), 0.8, 1e-15);
  EXPECT_NEAR(s[0].injection().i_gi().imag(), 1.1, 1e-15);
}

TEST(SampleTable, InconsistentComponentsRejected) {
  std::istringstream in(
      "eta_c,v_o,f_o_hz,y_v_re,y_v_im,y_omega_re,y_omega_im,y_eta_re,y_eta_im,i_g1_re,i_g1_im,"
      "i_gm1_re,i_gm1_im,i_gr_re,i_gr_im,i_gi_re,i_gi_im\n"
      "1,0.6,5e9,1e-2,0,0,1e-12,0,-1e-3,1,0,0,0,0.8,0,0,1.1\n");
  EXPECT_THROW(read_sample_table(in), config_error);
}

TEST(SampleTable, MalformedInputRejected) {
  std::istringstream missing("eta_c,v_o\n1,2\n");
  EXPECT_THROW(read_sample_table(missing), config_error);
  std::istringstream empty("");
  EXPECT_THROW(read_sample_table(empty), config_error);
  std::stringstream ok;
  write_sample_table(ok, some_samples());
  std::string text = ok.str();
  text.replace(text.find('\n') + 1, 3, "x.y");
  std::istringstream bad(text);
  EXPECT_THROW(read_sample_table(bad), config_error);
  std::istringstream short_row(ok.str() + "1,2,3\n");
  EXPECT_THROW(read_sample_table(short_row), config_error);
}
