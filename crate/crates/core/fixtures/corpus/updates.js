const client = require('./db').client;
const dbName = 'blog';

function publish(req, res) {
  const post = req.body;
  if (post.title == null) {
    res.status(400).end();
    return;
  }
  client.db(dbName).collection('posts').insertOne({ title: post.title, draft: false, tags: ['news'], author: { name: post.author, karma: 0 } }, (err, result) => {
    res.json(result);
  });
}

function tag(req, res) {
  client.db(dbName).collection('posts').updateOne({ _id: req.params.id }, { $push: { tags: req.body.tag }, $set: { 'author.karma': 1, views: 0 } }, (err, result) => {
    res.json(result);
  });
}

function remove(req, res) {
  client.db(dbName).collection('posts').deleteOne({ _id: req.params.id }, (err, result) => {
    res.json(result);
  });
}

function comments(req, res) {
  client.db(dbName).collection('posts').findOne({ _id: req.params.id }, (err, post) => {
    client.db(dbName).collection('comments').find({ post_id: post._id }).toArray((err, list) => {
      list.forEach((c) => {
        console.log(post.title + ': ' + c.text);
      });
      res.end();
    });
  });
}
