#include "doctest.h"
#include "helpers.hpp"

#include "cbrowse/article.hpp"
#include "cbrowse/error.hpp"

using namespace cbrowse;

namespace {

Timestamp at(long long secs) { return Timestamp(std::chrono::seconds(secs)); }

}  // namespace

TEST_CASE("article ids are deterministic per source and url") {
  auto id = article_id("nm1", "https://x/1");
  CHECK(id.size() == 16);
  CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(article_id("nm1", "https://x/1") == id);
  CHECK(article_id("nm2", "https://x/1") != id);
  CHECK(article_id("nm1", "https://x/2") != id);
  // The separator keeps ("a", "bc") and ("ab", "c") apart.
  CHECK(article_id("a", "bc") != article_id("ab", "c"));
}

TEST_CASE("absolute urls") {
  CHECK(is_absolute_url("https://x/1"));
  CHECK(is_absolute_url("http://example.com"));
  CHECK(is_absolute_url("https://example.com:8080/a?b=c#d"));
  CHECK_FALSE(is_absolute_url("/relative/path"));
  CHECK_FALSE(is_absolute_url("example.com/x"));
  CHECK_FALSE(is_absolute_url("https://"));
  CHECK_FALSE(is_absolute_url("https://exa mple.com"));
  CHECK_FALSE(is_absolute_url(""));
}

TEST_CASE("rfc3339") {
  CHECK(format_rfc3339(at(0)) == "1970-01-01T00:00:00Z");
  CHECK(format_rfc3339(at(1508500000)) == "2017-10-20T11:46:40Z");
  CHECK(parse_rfc3339("2017-10-20T11:46:40Z") == at(1508500000));
  CHECK(parse_rfc3339("2017-10-20T13:46:40+02:00") == at(1508500000));
  CHECK(parse_rfc3339("2017-10-20T07:46:40.75-04:00") == at(1508500000));
  CHECK_THROWS_AS(parse_rfc3339("2017-10-20 11:46:40"), InvalidArgument);
  CHECK_THROWS_AS(parse_rfc3339("2017-02-30T00:00:00Z"), InvalidArgument);
  for (long long t : {0LL, 951782400LL, 1508500000LL, 4102444799LL}) CHECK(parse_rfc3339(format_rfc3339(at(t))) == at(t));
}

TEST_CASE("make_article enforces the invariants") {
  auto a = make_article("nm1", "  Bush speaks \n", " body ", " https://x/1 ", at(5));
  CHECK(a.title == "Bush speaks");
  CHECK(a.description == "body");
  CHECK(a.url == "https://x/1");
  CHECK(a.id == article_id("nm1", "https://x/1"));
  CHECK_THROWS_AS(make_article("nm1", "   ", "", "https://x/1", at(0)), InvalidArgument);
  CHECK_THROWS_AS(make_article("nm1", "t", "", "x/1", at(0)), InvalidArgument);
  CHECK_THROWS_AS(make_article("", "t", "", "https://x/1", at(0)), InvalidArgument);
}

TEST_CASE("corpus file round trip") {
  std::vector<Article> corpus{make_article("nm1", "Bush speaks", "", "https://x/1", at(1508500000)),
                              make_article("nm2", "Qatar port", "Trade news.", "https://y/2", at(1508500001))};
  auto text = dump_corpus(corpus);
  CHECK(parse_corpus(text) == corpus);
  CHECK(dump_corpus(parse_corpus(text)) == text);
  CHECK(text.find("\"fetched_at\": \"2017-10-20T11:46:40Z\"") != std::string::npos);
  CHECK(parse_corpus("[]").empty());

  auto shipped = load_corpus(cbrowse::testing::fixture("corpus30.json"));
  CHECK(shipped.size() == 30);
  CHECK(dump_corpus(shipped) == cbrowse::testing::read_file(cbrowse::testing::fixture("corpus30.json")));
}

TEST_CASE("corpus parse errors") {
  try {
    parse_corpus("[{\"source\": }]");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 12);
    CHECK(std::string(e.what()).find("at byte 12") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_corpus("{}"), InvalidArgument);
  CHECK_THROWS_AS(parse_corpus(R"([{"source":"s","title":"","description":"","url":"https://x","fetched_at":"2017-10-20T11:46:40Z"}])"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_corpus(R"([{"source":"s","title":"t","url":"https://x"}])"), InvalidArgument);
  // A missing description reads as empty.
  CHECK(parse_corpus(R"([{"source":"s","title":"t","url":"https://x","fetched_at":"2017-10-20T11:46:40Z"}])")
            .at(0)
            .description.empty());
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.json"), ConfigError);
}
