#include "colmatch/ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "colmatch/error.hpp"
#include "test_support.hpp"

namespace colmatch {
namespace {

using testing::TempDir;
using testing::write_file;

std::string cast(std::string_view raw) { return cast_value_to_text(parse_cell(raw)); }

TEST(LoadDatabase, EnumeratesTables) {
  TempDir dir;
  write_file(dir / "patient.csv", "id,gender\n1,F\n");
  write_file(dir / "diagnosis.csv", "id,code\n1,x\n");
  auto db = load_database(dir.path(), "db");
  ASSERT_EQ(db.tables.size(), 2u);
  EXPECT_EQ(db.tables[0].name, "diagnosis");
  EXPECT_EQ(db.tables[1].name, "patient");
  EXPECT_EQ(db.tables[1].columns, (std::vector<std::string>{"id", "gender"}));
  EXPECT_NE(db.find_table("patient"), nullptr);
  EXPECT_EQ(db.find_table("nope"), nullptr);
}

TEST(LoadDatabase, MissingRoot) {
  EXPECT_THROW(load_database("/nonexistent/colmatch-db", "x"), InputError);
}

TEST(LoadDatabase, EmptyDirectory) {
  TempDir dir;
  EXPECT_THROW(load_database(dir.path(), "x"), InputError);
}

TEST(LoadDatabase, HeaderlessFileIsMalformed) {
  TempDir dir;
  write_file(dir / "patient.csv", "");
  try {
    load_database(dir.path(), "x");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("malformed header"), std::string::npos);
  }
}

TEST(LoadDatabase, NumericHeaderIsMalformed) {
  TempDir dir;
  write_file(dir / "patient.csv", "1,2\nF,M\n");
  EXPECT_THROW(load_database(dir.path(), "x"), InputError);
}

TEST(LoadDatabase, DuplicateHeaderNameIsMalformed) {
  TempDir dir;
  write_file(dir / "patient.csv", "id,id\n1,2\n");
  EXPECT_THROW(load_database(dir.path(), "x"), InputError);
}

TEST(LoadDatabase, DuplicateTableNames) {
  TempDir dir;
  write_file(dir / "patient.csv", "id\n1\n");
  write_file(dir / "patient.CSV", "id\n1\n");
  EXPECT_THROW(load_database(dir.path(), "x"), InputError);
}

TEST(LoadDatabase, EicuFixtureHasPatientTable) {
  auto db = load_database(testing::fixtures_dir() / "mini-eicu", "mini-eicu");
  const auto* patient = db.find_table("patient");
  ASSERT_NE(patient, nullptr);
  auto has = [&](std::string_view c) {
    return std::find(patient->columns.begin(), patient->columns.end(), c) !=
           patient->columns.end();
  };
  EXPECT_TRUE(has("gender"));
  EXPECT_TRUE(has("ethnicity"));
}

TEST(CastValue, Examples) {
  EXPECT_EQ(cast_value_to_text(CellValue{std::int64_t{41071}}), "41071");
  EXPECT_EQ(cast_value_to_text(CellValue{410.71}), "410.71");
  EXPECT_EQ(cast_value_to_text(CellValue{std::string("  F ")}), "F");
}

TEST(CastValue, IntegerCanonicalForm) {
  EXPECT_EQ(cast("0389"), "389");
  EXPECT_EQ(cast("+7"), "7");
  EXPECT_EQ(cast("-0"), "0");
  EXPECT_EQ(cast("-12"), "-12");
  EXPECT_EQ(cast("9223372036854775807"), "9223372036854775807");
}

TEST(CastValue, FloatShortestRoundTrip) {
  EXPECT_EQ(cast("35.0"), "35");
  EXPECT_EQ(cast("0.10"), "0.1");
  EXPECT_EQ(cast("1e3"), "1000");
  EXPECT_EQ(cast("7.25"), "7.25");
  // Out of int64 range falls through to float.
  EXPECT_EQ(cast("9223372036854775808"), "9223372036854775808");
}

TEST(CastValue, NonFiniteWordsAreText) {
  EXPECT_EQ(parse_cell("inf").index(), 3u);
  EXPECT_EQ(parse_cell("nan").index(), 3u);
  EXPECT_EQ(parse_cell("1-2").index(), 3u);
  EXPECT_EQ(parse_cell("410.71, I21.4").index(), 3u);
}

TEST(CastValue, Timestamps) {
  EXPECT_EQ(cast("2150-03-12"), "2150-03-12");
  EXPECT_EQ(cast("2150-03-12 14:23:00"), "2150-03-12T14:23:00");
  EXPECT_EQ(cast("2150-03-12T14:23"), "2150-03-12T14:23:00");
  EXPECT_EQ(cast("14:23:00"), "14:23:00");
  EXPECT_EQ(parse_cell("2150-13-12").index(), 3u);
  EXPECT_EQ(parse_cell("25:00:00").index(), 3u);
}

TEST(CastValue, IntegerInjectiveOnSample) {
  std::mt19937_64 rng(11);
  std::set<std::string> seen;
  std::set<std::int64_t> ints;
  for (int i = 0; i < 2000; ++i) {
    auto v = static_cast<std::int64_t>(rng());
    if (!ints.insert(v).second) continue;
    auto text = cast_value_to_text(CellValue{v});
    EXPECT_TRUE(seen.insert(text).second);
    EXPECT_EQ(std::get<std::int64_t>(parse_cell(text)), v);
  }
}

TEST(CastValue, TimestampRoundTrip) {
  for (std::string s : {"2020-02-29T23:59:59", "1999-12-31", "00:00:00"}) {
    EXPECT_EQ(cast(s), s);
  }
}

TEST(NullCells, Markers) {
  EXPECT_TRUE(is_null_cell(""));
  EXPECT_TRUE(is_null_cell("   "));
  EXPECT_TRUE(is_null_cell("NULL"));
  EXPECT_TRUE(is_null_cell("null"));
  EXPECT_TRUE(is_null_cell(" NuLl "));
  EXPECT_FALSE(is_null_cell("nil"));
  EXPECT_FALSE(is_null_cell("0"));
}

TEST(InferType, Rules) {
  using V = std::vector<std::string>;
  EXPECT_EQ(infer_data_type(V{"1", "2"}), DataType::kInteger);
  EXPECT_EQ(infer_data_type(V{"1", "2.5"}), DataType::kFloat);
  EXPECT_EQ(infer_data_type(V{"2150-03-12", "14:23:00"}), DataType::kTimestamp);
  EXPECT_EQ(infer_data_type(V{"F", "M"}), DataType::kText);
  EXPECT_EQ(infer_data_type(V{"98.6", "Hypertension"}), DataType::kMixed);
  EXPECT_EQ(infer_data_type(V{"2150-03-12", "soon"}), DataType::kText);
  EXPECT_EQ(infer_data_type(V{}), DataType::kText);
}

TEST(InferType, Words) {
  for (auto t : {DataType::kInteger, DataType::kFloat, DataType::kTimestamp, DataType::kText,
                 DataType::kMixed}) {
    EXPECT_EQ(parse_data_type(to_string(t)), t);
  }
  EXPECT_FALSE(parse_data_type("string"));
}

TEST(Profile, GenderCounts) {
  TempDir dir;
  write_file(dir / "patients.csv", "subject_id,gender\n1,F\n2,M\n3,F\n4,\n5,M\n");
  auto db = load_database(dir.path(), "mimic");
  auto p = profile_column(db, "gender");
  EXPECT_EQ(p.unique_values, (std::vector<std::string>{"F", "M"}));
  EXPECT_EQ(p.total_count, 5u);
  EXPECT_EQ(p.null_count, 1u);
  EXPECT_EQ(p.dtype, DataType::kText);
}

TEST(Profile, EicuGenderFixture) {
  auto db = load_database(testing::fixtures_dir() / "mini-eicu", "mini-eicu");
  auto p = profile_column(db, "gender");
  auto sorted = p.unique_values;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::string>{"Female", "Male"}));
}

TEST(Profile, AllNullColumn) {
  TempDir dir;
  write_file(dir / "t.csv", "a,b\n1,\n2,NULL\n");
  auto p = profile_column(load_database(dir.path(), "d"), "b");
  EXPECT_TRUE(p.unique_values.empty());
  EXPECT_EQ(p.dtype, DataType::kText);
  EXPECT_EQ(p.null_count, 2u);
}

TEST(Profile, PoolsAcrossTablesFirstSeen) {
  TempDir dir;
  write_file(dir / "a.csv", "id,x\n3,p\n1,q\n");
  write_file(dir / "b.csv", "id\n1\n2\n");
  auto p = profile_column(load_database(dir.path(), "d"), "id");
  EXPECT_EQ(p.ref.tables, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(p.unique_values, (std::vector<std::string>{"3", "1", "2"}));
  EXPECT_EQ(p.total_count, 4u);
  EXPECT_EQ(p.dtype, DataType::kInteger);
}

TEST(Profile, UnknownColumn) {
  TempDir dir;
  write_file(dir / "t.csv", "a\n1\n");
  EXPECT_THROW(profile_column(load_database(dir.path(), "d"), "zz"), InputError);
}

TEST(Profile, RaggedRowRejected) {
  TempDir dir;
  write_file(dir / "t.csv", "a,b\n1,2\n3\n");
  EXPECT_THROW(profile_column(load_database(dir.path(), "d"), "a"), InputError);
}

TEST(Profile, BlankLinesSkipped) {
  TempDir dir;
  write_file(dir / "t.csv", "a,b\n1,2\n\n3,4\n");
  auto p = profile_column(load_database(dir.path(), "d"), "a");
  EXPECT_EQ(p.total_count, 2u);
}

TEST(Profile, IdempotentAndDuplicationInvariant) {
  TempDir dir;
  write_file(dir / "t.csv", "a\nx\ny\nx\n");
  auto db = load_database(dir.path(), "d");
  auto p1 = profile_column(db, "a");
  auto p2 = profile_column(db, "a");
  EXPECT_EQ(p1.unique_values, p2.unique_values);

  write_file(dir / "t.csv", "a\nx\ny\nx\nx\ny\ny\n");
  auto p3 = profile_column(load_database(dir.path(), "d"), "a");
  EXPECT_EQ(p3.unique_values, p1.unique_values);
  EXPECT_EQ(p3.total_count, 6u);
}

TEST(Profile, DatabaseMatchesPerColumn) {
  auto db = load_database(testing::fixtures_dir() / "mini-mimic", "mini-mimic");
  auto all = profile_database(db);
  auto refs = list_column_refs(db);
  ASSERT_EQ(all.size(), refs.size());
  for (std::size_t i = 0; i < refs.size(); i += 5) {
    auto single = profile_column(db, refs[i].column_name);
    EXPECT_EQ(all[i].ref, single.ref);
    EXPECT_EQ(all[i].unique_values, single.unique_values);
    EXPECT_EQ(all[i].total_count, single.total_count);
    EXPECT_EQ(all[i].dtype, single.dtype);
  }
}

TEST(ListRefs, StayIdPooledInFourTables) {
  auto db = load_database(testing::fixtures_dir() / "mini-eicu", "mini-eicu");
  auto refs = list_column_refs(db);
  auto it = std::find_if(refs.begin(), refs.end(),
                         [](const ColumnRef& r) { return r.column_name == "patientunitstayid"; });
  ASSERT_NE(it, refs.end());
  EXPECT_EQ(it->tables,
            (std::vector<std::string>{"diagnosis", "medication", "pasthistory", "patient"}));
  EXPECT_TRUE(std::is_sorted(refs.begin(), refs.end(), name_less));
}

TEST(ListRefs, SingleTableAndGrouping) {
  TempDir dir;
  write_file(dir / "t.csv", "a,b,c\n1,2,3\n");
  EXPECT_EQ(list_column_refs(load_database(dir.path(), "d")).size(), 3u);

  TempDir dir2;
  write_file(dir2 / "x.csv", "id,v\n1,2\n");
  write_file(dir2 / "y.csv", "id,w\n1,2\n");
  auto refs = list_column_refs(load_database(dir2.path(), "d"));
  ASSERT_EQ(refs.size(), 3u);
  EXPECT_EQ(refs[0].column_name, "id");
  EXPECT_EQ(refs[0].tables, (std::vector<std::string>{"x", "y"}));
}

}  // namespace
}  // namespace colmatch
