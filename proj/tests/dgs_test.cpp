#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "evgraph/dgs.hpp"
#include "fig2.hpp"
#include "support/oracles.hpp"

using namespace evgraph;

namespace {

// Returns the ParseError raised by parsing `text`, failing the test if none.
ParseError parse_error(std::string_view text) {
  try {
    parse_dgs(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError(0, 0, "none");
}

}  // namespace

TEST(DgsRead, Fig2FirstStep) {
  const auto events = parse_dgs("DGS004\nfig2 0 0\nst 0\nan v1\nan v2\nae e12 v1 v2\n");
  const EventList expected{StepBegins{0}, NodeAdded{"v1", {}}, NodeAdded{"v2", {}},
                           EdgeAdded{"e12", "v1", "v2", false, {}}};
  EXPECT_EQ(events, expected);
}

TEST(DgsRead, EmptyDocument) {
  std::istringstream in("DGS004\nempty 0 0\n");
  const auto doc = read_dgs_document(in);
  EXPECT_EQ(doc.name, "empty");
  EXPECT_TRUE(doc.events.empty());
}

TEST(DgsRead, NodeWithAttributes) {
  const auto events = parse_dgs("DGS004\nx 0 0\nan n1 weight=2.5 label=\"hub\"\n");
  ASSERT_EQ(events.size(), 1u);
  const EventList expected{NodeAdded{"n1", {{"weight", AttrValue(2.5)}, {"label", AttrValue("hub")}}}};
  EXPECT_EQ(events, expected);
}

TEST(DgsRead, ValueForms) {
  const auto events = parse_dgs(
      "DGS004\nx 0 0\n"
      "an a i=-3 e=1.5e-3 t=true f=false s=\"q\\\"b\\\\\" l={1,\"two\",{true}} empty={}\n");
  const auto& attrs = std::get<NodeAdded>(events.at(0)).attrs;
  EXPECT_EQ(attrs.at("i"), AttrValue(-3.0));
  EXPECT_EQ(attrs.at("e"), AttrValue(1.5e-3));
  EXPECT_EQ(attrs.at("t"), AttrValue(true));
  EXPECT_EQ(attrs.at("f"), AttrValue(false));
  EXPECT_EQ(attrs.at("s"), AttrValue("q\"b\\"));
  EXPECT_EQ(attrs.at("l"),
            AttrValue(AttrValue::List{AttrValue(1.0), AttrValue("two"), AttrValue(AttrValue::List{AttrValue(true)})}));
  EXPECT_EQ(attrs.at("empty"), AttrValue(AttrValue::List{}));
}

TEST(DgsRead, ChangeLinesSplitIntoOneEventPerAttribute) {
  const auto events = parse_dgs("DGS004\nx 0 0\ncn a x=1 y=\ncg title=\"t\"\nce e w=2\n");
  const EventList expected{NodeAttrChanged{"a", "x", AttrValue(1.0)}, NodeAttrChanged{"a", "y", std::nullopt},
                           GraphAttrChanged{"title", AttrValue("t")}, EdgeAttrChanged{"e", "w", AttrValue(2.0)}};
  EXPECT_EQ(events, expected);
}

TEST(DgsRead, DirectedEdges) {
  const auto events = parse_dgs("DGS004\nx 0 0\nae e1 a b >\nae e2 a b <\nae e3 a b\n");
  EXPECT_EQ(events[0], (Event{EdgeAdded{"e1", "a", "b", true, {}}}));
  EXPECT_EQ(events[1], (Event{EdgeAdded{"e2", "b", "a", true, {}}}));
  EXPECT_EQ(events[2], (Event{EdgeAdded{"e3", "a", "b", false, {}}}));
}

TEST(DgsRead, CommentsBlankLinesAndCrLf) {
  const auto events = parse_dgs("DGS004\r\nx 0 0\r\n# a comment\r\n\r\n   \r\nan a # trailing\r\nst 1.5\r\n");
  const EventList expected{NodeAdded{"a", {}}, StepBegins{1.5}};
  EXPECT_EQ(events, expected);
}

TEST(DgsRead, HeaderCountsAreIgnored) {
  EXPECT_TRUE(parse_dgs("DGS004\nbig 12 34\n").empty());
}

TEST(DgsRead, ErrorsCarryLineAndColumn) {
  struct Case {
    const char* text;
    std::size_t line, column;
  };
  const Case cases[] = {
      {"DGS003\nx 0 0\n", 1, 1},
      {"DGS004\n", 2, 1},
      {"DGS004\nx 0\n", 2, 4},
      {"DGS004\nx a 0\n", 2, 3},
      {"DGS004\nx 0 0\nzz a\n", 3, 1},
      {"DGS004\nx 0 0\nan a\nst\n", 4, 3},
      {"DGS004\nx 0 0\nst -1\n", 3, 4},
      {"DGS004\nx 0 0\nst 1 2\n", 3, 6},
      {"DGS004\nx 0 0\nan a w=\n", 3, 6},
      {"DGS004\nx 0 0\nan a w=\"open\n", 3, 8},
      {"DGS004\nx 0 0\nae e a\n", 3, 7},
      {"DGS004\nx 0 0\ncn a\n", 3, 5},
      {"DGS004\nx 0 0\nan a w=nan\n", 3, 8},
      {"DGS004\nx 0 0\nan a w={1,\n", 3, 8},
  };
  for (const auto& c : cases) {
    const ParseError e = parse_error(c.text);
    EXPECT_EQ(e.line(), c.line) << c.text;
    EXPECT_EQ(e.column(), c.column) << c.text << " -> " << e.what();
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(c.line)), std::string::npos);
  }
}

TEST(DgsRead, StreamsOneEventAtATime) {
  std::istringstream in("DGS004\nx 0 0\nan a\nan b\nzz\n");
  DgsReader reader(in);
  EXPECT_EQ(reader.next(), std::optional<Event>(NodeAdded{"a", {}}));
  EXPECT_EQ(reader.next(), std::optional<Event>(NodeAdded{"b", {}}));
  // The malformed line is only reached now.
  EXPECT_THROW(reader.next(), ParseError);
}

TEST(DgsWrite, EmptyList) {
  EXPECT_EQ(write_dgs(EventList{}, "g"), "DGS004\ng 0 0\n");
}

TEST(DgsWrite, GraphAttribute) {
  const auto text = write_dgs(EventList{GraphAttrChanged{"title", AttrValue("t")}}, "g");
  EXPECT_NE(text.find("\ncg title=\"t\"\n"), std::string::npos);
}

TEST(DgsWrite, KeysInLexicographicOrder) {
  const EventList events{NodeAdded{"a", {{"zeta", AttrValue(1.0)}, {"alpha", AttrValue(2.0)}, {"mid", AttrValue(true)}}}};
  EXPECT_EQ(write_dgs(events, "g"), "DGS004\ng 0 0\nan a alpha=2 mid=true zeta=1\n");
}

TEST(DgsWrite, Fig2RoundTrip) {
  const auto events = fixtures::fig2_events();
  const auto text = write_dgs(events, "fig2");
  EXPECT_EQ(parse_dgs(text), events);
  EXPECT_EQ(write_dgs(parse_dgs(text), "fig2"), text);
}

TEST(DgsWrite, RejectsUnwritableContent) {
  EXPECT_THROW(write_dgs(EventList{NodeAdded{"a b", {}}}, "g"), DgsWriteError);
  EXPECT_THROW(write_dgs(EventList{NodeAdded{"a", {{"k=", AttrValue(1.0)}}}}, "g"), DgsWriteError);
  EXPECT_THROW(write_dgs(EventList{NodeAdded{"a", {{"k", AttrValue(INFINITY)}}}}, "g"), DgsWriteError);
  EXPECT_THROW(write_dgs(EventList{NodeAdded{"a", {{"k", AttrValue("two\nlines")}}}}, "g"), DgsWriteError);
  EXPECT_THROW(write_dgs(EventList{StepBegins{-1}}, "g"), DgsWriteError);
  EXPECT_THROW(write_dgs(EventList{}, "bad name"), DgsWriteError);
}

TEST(DgsWrite, WriterLeavesNoPartialLine) {
  std::ostringstream out;
  DgsWriter w(out, "g");
  w.consume(NodeAdded{"a", {}});
  EXPECT_THROW(w.consume(NodeAdded{"b", {{"k", AttrValue(NAN)}}}), DgsWriteError);
  EXPECT_EQ(out.str(), "DGS004\ng 0 0\nan a\n");
}

TEST(DgsWrite, NumbersRoundTripExactly) {
  const double values[] = {0.0,
                           -0.0,
                           0.1,
                           1.0 / 3.0,
                           -2.5e-300,
                           std::numeric_limits<double>::denorm_min(),
                           std::numeric_limits<double>::max(),
                           123456789012345678.0,
                           1e21};
  for (double v : values) {
    const EventList events{NodeAdded{"a", {{"v", AttrValue(v)}}}, StepBegins{std::fabs(v)}};
    const auto back = parse_dgs(write_dgs(events, "g"));
    const double got = std::get<NodeAdded>(back.at(0)).attrs.at("v").as_number();
    EXPECT_EQ(got, v);
    EXPECT_EQ(std::signbit(got), std::signbit(v));
    EXPECT_EQ(std::get<StepBegins>(back.at(1)).time, std::fabs(v));
  }
}

TEST(DgsProperty, RandomStreamsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto events = oracle::RandomStream(seed).generate(1 + seed % 300);
    const auto text = write_dgs(events, "r");
    ASSERT_EQ(parse_dgs(text), events) << "seed " << seed;
    // Byte-for-byte deterministic.
    ASSERT_EQ(write_dgs(events, "r"), text);
  }
}

TEST(DgsProperty, ReaderAsSourceFeedsPipeline) {
  const auto events = oracle::RandomStream(5).generate(400);
  std::istringstream in(write_dgs(events, "r"));
  DgsReader reader(in);
  Collector sink;
  pipe(reader, {}, sink);
  EXPECT_EQ(sink.events, events);
  EXPECT_EQ(reader.name(), "r");
}
