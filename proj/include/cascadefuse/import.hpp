#pragma once

#include <string>

#include "cascadefuse/dataset.hpp"

namespace cascadefuse {

enum class ImportFormat { Weibo, Twitter };

/// "weibo", "twitter15", "twitter16" (the two Twitter releases share a layout).
ImportFormat parse_import_format(const std::string& text);

/// rumdect layout: <root>/Weibo.txt with lines "eid:ID label:L post ids..."
/// and <root>/Weibo/<ID>.json holding the post array (fields t, text,
/// followers_count, friends_count, statuses_count, verified,
/// user_geo_enabled, user_created_at, username, user_description).
/// Label 0 maps to true, 1 to fake. Binary label set.
DatasetManifest import_weibo(const std::string& root);

/// rumor_detection_acl2017 layout: <root>/label.txt ("label:tweet_id"),
/// <root>/source_tweets.txt ("tweet_id<TAB>text") and <root>/tree/<id>.txt
/// with edges "[uid, tweet_id, delay_minutes]->[uid, tweet_id, delay_minutes]".
/// Labels: non-rumor -> true, false -> fake, unverified, true -> debunking.
/// The release carries no audience sizes, so every post gets followers = 1.
/// Four-class label set.
DatasetManifest import_twitter(const std::string& root);

DatasetManifest import_dataset(ImportFormat format, const std::string& root);

}  // namespace cascadefuse
