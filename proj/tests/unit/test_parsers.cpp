#include <doctest.h>

#include "dmlkit/metadata_parsers.hpp"
#include "dmlkit/oai_record.hpp"
#include "dmlkit/text.hpp"
#include "support.hpp"

using namespace dmlkit;
using namespace dmlkit::parsers;
namespace t = dmlkit::testing;

namespace {

std::string payload_of(const std::string& fixture) {
  return *oai::parse_oai_envelope(t::read_file(t::fixture(fixture))).at(0).payload;
}

const char* kDcOpen =
    "<oai_dc:dc xmlns:oai_dc='http://www.openarchives.org/OAI/2.0/oai_dc/' "
    "xmlns:dc='http://purl.org/dc/elements/1.1/'>";

}  // namespace

TEST_CASE("Euclid oai_dc record") {
  const auto rec = parse_oai_dc(payload_of("oai_dc/01-euclid-jmsj-1240435759.xml"));
  CHECK(rec.title == "Minimal 2-regular digraphs with given girth");
  CHECK(rec.creators == std::vector<std::string>{"BEHZAD, Mehdi"});
  CHECK(rec.subjects == std::vector<std::string>{"05C20"});
  CHECK(rec.publisher == "Mathematical Society of Japan");
  CHECK(rec.date == "1973-01");
  CHECK(rec.type == "Text");
  CHECK(rec.format == "application/pdf");
  CHECK(rec.identifiers == std::vector<std::string>{"http://projecteuclid.org/euclid.jmsj/1240435759",
                                                    "J. Math. Soc. Japan 25, no. 1 (1973), 1-6",
                                                    "doi:10.2969/jmsj/02510001"});
  CHECK(rec.language == "en");
  CHECK(rec.rights == "Copyright 1973 Mathematical Society of Japan");
}

TEST_CASE("minimal and repeated oai_dc elements") {
  const auto minimal = parse_oai_dc(std::string(kDcOpen) +
                                    "<dc:title>T</dc:title><dc:identifier>http://x.org/1</dc:identifier></oai_dc:dc>");
  CHECK(minimal.title == "T");
  CHECK(minimal.creators.empty());
  CHECK(minimal.publisher.empty());
  const auto two = parse_oai_dc(std::string(kDcOpen) +
                                "<dc:title>T</dc:title><dc:creator>B, b</dc:creator><dc:creator>A, a</dc:creator>"
                                "<dc:identifier>http://x.org/1</dc:identifier></oai_dc:dc>");
  CHECK(two.creators == std::vector<std::string>{"B, b", "A, a"});
}

TEST_CASE("oai_dc errors") {
  CHECK_THROWS_AS(parse_oai_dc(std::string(kDcOpen) + "<dc:identifier>http://x.org/</dc:identifier></oai_dc:dc>"),
                  ValidationError);
  CHECK_THROWS_AS(parse_oai_dc(std::string(kDcOpen) + "<dc:title>T</dc:title></oai_dc:dc>"), ValidationError);
  CHECK_THROWS_AS(parse_oai_dc("<meta><title>T</title></meta>"), ParseError);
  CHECK_THROWS_AS(parse_oai_dc("<oai_dc:dc"), ParseError);
}

TEST_CASE("Ochanomizu junii2 record") {
  const auto rec = parse_junii2(payload_of("junii2/01-ocha-10083-843.xml"));
  CHECK(rec.title == "CONDITIONALLY TRIMMED SUMS FOR INDEPENDENT RANDOM VARIABLES");
  CHECK(rec.creators == std::vector<std::string>{"KASAHARA, Yuji"});
  CHECK(rec.ndc == "400");
  CHECK(rec.publisher == "Ochanomizu University");
  CHECK(rec.nii_type == "Departmental Bulletin Paper");
  CHECK(rec.formats == std::vector<std::string>{"application/pdf", "191755 bytes"});
  CHECK(rec.uri == "http://hdl.handle.net/10083/843");
  CHECK(rec.full_text_url == "http://teapot.lib.ocha.ac.jp/ocha/bitstream/10083/843/1/KJ00004470846.pdf");
  CHECK(rec.issn == "00298190");
  CHECK(rec.ncid == "AN00033958");
  CHECK(rec.jtitle == "Natur. Sci. Rep. Ochanomizu Univ.");
  CHECK(rec.volume == "46");
  CHECK(rec.issue == "2");
  CHECK(rec.spage == "9");
  CHECK(rec.epage == "12");
  CHECK(rec.date_of_issued == "1995-12-30");
}

TEST_CASE("junii2 variants and errors") {
  const auto meta = [](const std::string& body) { return "<meta xmlns='http://ju.nii.ac.jp/junii2'>" + body + "</meta>"; };
  const auto no_jtitle = parse_junii2(meta("<title>T</title><URI>http://h.net/1</URI>"));
  CHECK(no_jtitle.jtitle.empty());
  CHECK_THROWS_AS(parse_junii2(meta("<title>T</title><URI>http://h.net/1</URI><spage>12</spage><epage>9</epage>")),
                  ValidationError);
  CHECK_THROWS_AS(parse_junii2(meta("<URI>http://h.net/1</URI>")), ValidationError);
  CHECK_THROWS_AS(parse_junii2(meta("<title>T</title>")), ValidationError);
  CHECK_THROWS_AS(parse_junii2(meta("<title>T</title><URI>http://h.net/1</URI><volume>4a</volume>")),
                  ValidationError);
  CHECK_THROWS_AS(parse_junii2(meta("<title>T</title><URI>http://h.net/1</URI><issn>1234-567</issn>")),
                  ValidationError);
  CHECK(parse_junii2(meta("<title>T</title><URI>http://h.net/1</URI><issn>0029-8190</issn>")).issn == "0029-8190");
  const std::string japanese = "\xE8\x87\xAA\xE7\x84\xB6\xE7\xA7\x91\xE5\xAD\xA6\xE5\xA0\xB1\xE5\x91\x8A";
  CHECK(parse_junii2(meta("<title>T</title><URI>http://h.net/1</URI><jtitle>" + japanese + "</jtitle>")).jtitle ==
        japanese);
}

TEST_CASE("citation: Euclid identifier") {
  const auto c = parse_citation_string("J. Math. Soc. Japan 25, no. 1 (1973), 1-6");
  CHECK(c.journal_title == "J. Math. Soc. Japan");
  CHECK(c.volume == "25");
  CHECK(c.issue == "1");
  CHECK(c.year == 1973);
  CHECK(c.spage == 1u);
  CHECK(c.epage == 6u);
  CHECK(c.raw == "J. Math. Soc. Japan 25, no. 1 (1973), 1-6");
}

TEST_CASE("citation: Yokohama bulletin") {
  for (const char* s : {"Nat. Sci. J. Fac. Educ. Hum. Sci. Yokohama National University Sec. I, 1 (1998) . pp. 43-46",
                        "Nat. Sci. J. Fac. Educ. Hum. Sci. Yokohama National University Sec. I, 1 (1998) . pp. 43-46."}) {
    const auto c = parse_citation_string(s);
    CHECK(c.journal_title == "Nat. Sci. J. Fac. Educ. Hum. Sci. Yokohama National University Sec. I");
    CHECK(c.volume == "1");
    CHECK_FALSE(c.issue);
    CHECK(c.year == 1998);
    CHECK(c.spage == 43u);
    CHECK(c.epage == 46u);
    CHECK(c.raw == s);
  }
}

TEST_CASE("citation: fallbacks and variants") {
  const auto plain = parse_citation_string("Some Unstructured String");
  CHECK(plain.journal_title == "Some Unstructured String");
  CHECK_FALSE(plain.structured());
  CHECK_FALSE(plain.volume);
  CHECK_FALSE(plain.year);

  const auto dash = parse_citation_string("Tohoku Math. J. 59 (2007), 1\xE2\x80\x93" "20");
  CHECK(dash.journal_title == "Tohoku Math. J.");
  CHECK(dash.spage == 1u);
  CHECK(dash.epage == 20u);

  const auto out_of_range = parse_citation_string("Ann. Foo 3 (1200), 4-5");
  CHECK_FALSE(out_of_range.year);

  CHECK_THROWS_AS(parse_citation_string(""), InvalidArgument);
  CHECK_THROWS_AS(parse_citation_string("   "), InvalidArgument);
}

TEST_CASE("citation parser never throws on printable input") {
  t::Rng rng(20240611);
  const std::string alphabet =
      "abcXYZ0123456789 .,;:()-/\xE2\x80\x93" "no.issuepp.vol\t";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const int len = std::uniform_int_distribution<int>(1, 60)(rng);
    for (int k = 0; k < len; ++k) s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    if (text::trim(s).empty()) s += "x";
    CHECK_NOTHROW(parse_citation_string(s));
  }
}

TEST_CASE("citation render is a fixed point of the parser") {
  t::Rng rng(99);
  const std::vector<std::string> journals = {"J. Math. Soc. Japan", "Osaka J. Math.", "Kodai Math. J",
                                             "Proc. Japan Acad. Ser. A Math. Sci.", "Hokkaido Math. J."};
  for (int i = 0; i < 2000; ++i) {
    const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::string s = journals[static_cast<std::size_t>(pick(0, 4))];
    if (pick(0, 3)) s += " " + std::to_string(pick(1, 99));
    if (pick(0, 1)) s += ", no. " + std::to_string(pick(1, 6));
    if (pick(0, 3)) s += " (" + std::to_string(pick(1900, 2020)) + ")";
    if (pick(0, 3)) {
      const int sp = pick(1, 500);
      s += ", " + std::to_string(sp) + "-" + std::to_string(sp + pick(0, 30));
    }
    const auto first = parse_citation_string(s);
    const auto again = parse_citation_string(first.render());
    CHECK_MESSAGE(again.journal_title == first.journal_title, s);
    CHECK_MESSAGE(again.volume == first.volume, s);
    CHECK_MESSAGE(again.issue == first.issue, s);
    CHECK_MESSAGE(again.year == first.year, s);
    CHECK_MESSAGE(again.spage == first.spage, s);
    CHECK_MESSAGE(again.epage == first.epage, s);
  }
}

TEST_CASE("parsers are pure") {
  const auto payload = payload_of("oai_dc/01-euclid-jmsj-1240435759.xml");
  CHECK(parse_oai_dc(payload) == parse_oai_dc(payload));
}
