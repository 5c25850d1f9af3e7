const client = require('./db').client;
const dbName = 'school';

function roster(req, res) {
  client.db(dbName).collection('students').aggregate([
    { $match: { year: 2 } },
    { $lookup: { from: 'courses', localField: 'course_ids', foreignField: '_id', as: 'courses' } }
  ]).toArray((err, students) => {
    students.forEach((s) => {
      console.log(s.name + ' ' + s.courses[0].title + ' ' + s.courses[0].credits);
    });
    res.end();
  });
}

function teachers(req, res) {
  client.db(dbName).collection('courses').aggregate([
    { $lookup: { from: 'teachers', localField: 'teacher_id', foreignField: '_id', as: 'teacher' } },
    { $unwind: '$teacher' }
  ]).toArray((err, courses) => {
    res.json(courses);
  });
}
